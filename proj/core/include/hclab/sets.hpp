#pragma once

#include "hclab/beta.hpp"

#include <string>
#include <vector>

namespace hc {

/// Labeled union of closed intervals plus isolated points on [0, lambda_max],
/// with the per-gridpoint count of nonnegative eigenvalues of the
/// beta-matrix (d = strong band, 1..d-1 = weak band, 0 = gap when lambda is
/// also off the micro-spectrum).
struct SpectralSet {
    std::string label;
    std::vector<std::pair<double, double>> intervals;  // sorted, disjoint
    std::vector<double> points;                        // isolated values
    std::vector<double> grid;                          // annotation support
    std::vector<int> band_count;                       // per gridpoint

    bool contains(double lambda, double tol = 0.0) const;
    double distance(double lambda) const;
    /// Maximal open sub-intervals of [0, hi] \ set (points split gaps).
    std::vector<std::pair<double, double>> gaps(double hi) const;
    void normalize();  // sort + merge overlaps
};

/// Is `inner` contained in `outer` when both are evaluated on the given
/// grid (tolerance on membership of inner's sampled support)?
bool subset_on_grid(const SpectralSet& inner, const SpectralSet& outer,
                    const std::vector<double>& grid, double tol);

struct GridOptions {
    double lambda_max = 10.0;
    int points = 400;
    double bisect_tol_rel = 1e-8;  // of lambda_max
};

/// Micro-spectrum sigma(A0): the closure of the union of per-inclusion
/// Dirichlet spectra. Isolated points for discrete models, intervals
/// [nu/r2^2, nu/r1^2] for continuous scaling.
SpectralSet sigma_A0(const BetaEvaluator& eval, double lambda_max);

/// sigma(A_hom) = sigma(A0) u closure{ lambda : beta_max(lambda) >= 0 },
/// band boundaries located by bisection between grid points of opposite
/// sign; the annotation stores the count of nonnegative eigenvalues.
SpectralSet spectrum_hom(const BetaEvaluator& eval, const GridOptions& grid);

/// G = sigma(A0) u closure{ lambda : beta_infinity(lambda) >= 0 }, with the
/// closed-form beta_infinity evaluator.
SpectralSet set_G(const BetaEvaluator& eval, const GridOptions& grid,
                  const BetaInfinityOptions& binf);

/// The lambda grid used by the band computations: uniform on
/// [0, lambda_max] plus refinement pairs flanking each significant pole,
/// with guard-flagged values nudged off the guards.
std::vector<double> make_lambda_grid(const BetaEvaluator& eval, const GridOptions& grid);

}  // namespace hc
