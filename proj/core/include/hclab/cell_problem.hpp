#pragma once

#include "hclab/forms.hpp"
#include "hclab/geometry.hpp"

#include <cstdint>
#include <memory>
#include <vector>

namespace hc {

/// Periodic cell-problem output: correctors N^(j,k) (one per symmetric unit
/// strain, Mandel-indexed) on the perforated window, and the periodic
/// homogenized tensor, normalized by the full window volume.
struct CellProblemResult {
    ElasticityTensor chom;
    std::vector<Eigen::VectorXd> correctors;  // free-dof coefficients, zero mean
    Eigen::Matrix3d chom_mandel;
    Eigen::Matrix3d chom_mandel_direct;  // independent quartic-form evaluation
    double matrix_area = 0.0;
    double window_area = 0.0;
    double max_corrector_sym_grad_norm = 0.0;  // max_I ||sym grad N_I||_L2
    std::shared_ptr<Mesh> mesh;
    std::shared_ptr<AssembledForms> forms;
    double h = 0.0;
};

/// Solves, for each symmetric unit strain, the zero-mean periodic
/// variational problem  int C1 (xi + grad N) . grad phi = 0  over the
/// perforated window and assembles the homogenized tensor. Throws when the
/// matrix region is disconnected.
CellProblemResult periodic_corrector(const Configuration& cfg, const ElasticityTensor& c1,
                                     double h);

struct RveResult {
    ElasticityTensor mean;
    Eigen::Matrix3d spread;  // per-entry standard deviation, Mandel indexed
    std::vector<Eigen::Matrix3d> samples;
};

/// Periodized RVE approximation of the stochastic homogenized tensor:
/// sample mean and per-entry spread over seeded window realizations.
RveResult chom_rve(const InclusionModel& model, const ElasticityTensor& c1, int n_cells,
                   int samples, double h, std::uint64_t seed0 = 1);

}  // namespace hc
