#pragma once

#include "hclab/beta.hpp"
#include "hclab/cell_problem.hpp"
#include "hclab/sets.hpp"

namespace hc {

/// Discrete spectrum of the two-phase operator on the unit torus with
/// stiffness C1 in the matrix and eps^2 C0 in the inclusions, plus
/// distances to a caller-provided reference set.
struct EpsilonSpectrumReport {
    double epsilon = 0.0;
    double h_cell = 0.0;
    Eigen::VectorXd eigenvalues;           // ascending, nonnegative
    std::vector<double> distances;         // to the reference set
    std::vector<double> gap_violations;    // penetration depth inside reference gaps
    double energy_matrix = 0.0;            // split of u1' K u1 for the first nonzero mode
    double energy_inclusion = 0.0;
};

struct EpsilonSpectrumOptions {
    int n_cells = 8;       // torus = n_cells x n_cells cells, eps = 1/n_cells
    double h_cell = 1.0 / 16;
    int count = 20;
    std::uint64_t seed = 0;
    int dof_budget = 400;  // rejects n_cells / h_cell beyond this
};

EpsilonSpectrumReport epsilon_spectrum(const InclusionModel& model, const ElasticityTensor& c0,
                                       const ElasticityTensor& c1,
                                       const EpsilonSpectrumOptions& opt,
                                       const SpectralSet* reference = nullptr);

/// Residual of the b-corrected modulated plane wave
///   u = (1 + lambda0 b^eps) (eta_L A cos(w k.x))
/// in the discrete dual norm, together with the uncorrected (b = 0)
/// envelope residual for the ablation comparison.
struct QuasimodeReport {
    double lambda0 = 0.0;
    double envelope_width = 0.0;
    double epsilon = 0.0;
    double residual_ratio = 0.0;
    double residual_ratio_uncorrected = 0.0;
    double wavenumber = 0.0;
};

struct QuasimodeOptions {
    int n_cells = 8;
    double h_cell = 1.0 / 16;
    double h_shape = 1.0 / 32;    // reference-shape resolution for b fields
    double envelope_width = 0.5;  // L, torus units
    Eigen::Vector2d k_hat = Eigen::Vector2d(1.0, 0.0);
    std::uint64_t seed = 0;
};

QuasimodeReport quasimode_residual(const InclusionModel& model, const ElasticityTensor& c0,
                                   const ElasticityTensor& c1, double lambda0,
                                   const QuasimodeOptions& opt);

}  // namespace hc
