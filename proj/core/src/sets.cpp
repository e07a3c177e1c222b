#include "hclab/sets.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace hc {

bool SpectralSet::contains(double lambda, double tol) const {
    for (const auto& [a, b] : intervals)
        if (lambda >= a - tol && lambda <= b + tol) return true;
    for (double p : points)
        if (std::abs(lambda - p) <= tol) return true;
    return false;
}

double SpectralSet::distance(double lambda) const {
    double d = std::numeric_limits<double>::infinity();
    for (const auto& [a, b] : intervals) {
        if (lambda >= a && lambda <= b) return 0.0;
        d = std::min(d, std::min(std::abs(lambda - a), std::abs(lambda - b)));
    }
    for (double p : points) d = std::min(d, std::abs(lambda - p));
    return d;
}

std::vector<std::pair<double, double>> SpectralSet::gaps(double hi) const {
    // Sorted closed components (points as zero-length intervals).
    std::vector<std::pair<double, double>> comp = intervals;
    for (double p : points) comp.emplace_back(p, p);
    std::sort(comp.begin(), comp.end());
    std::vector<std::pair<double, double>> out;
    double cursor = 0.0;
    for (const auto& [a, b] : comp) {
        if (a > hi) break;
        if (a > cursor) out.emplace_back(cursor, std::min(a, hi));
        cursor = std::max(cursor, b);
    }
    if (cursor < hi) out.emplace_back(cursor, hi);
    return out;
}

void SpectralSet::normalize() {
    std::sort(intervals.begin(), intervals.end());
    std::vector<std::pair<double, double>> merged;
    for (const auto& iv : intervals) {
        if (!merged.empty() && iv.first <= merged.back().second) {
            merged.back().second = std::max(merged.back().second, iv.second);
        } else {
            merged.push_back(iv);
        }
    }
    intervals = std::move(merged);
    std::sort(points.begin(), points.end());
    std::vector<double> kept;
    for (double p : points) {
        bool inside = false;
        for (const auto& [a, b] : intervals)
            if (p >= a && p <= b) inside = true;
        if (!inside && (kept.empty() || p > kept.back())) kept.push_back(p);
    }
    points = std::move(kept);
}

bool subset_on_grid(const SpectralSet& inner, const SpectralSet& outer,
                    const std::vector<double>& grid, double tol) {
    for (double lam : grid)
        if (inner.contains(lam, 0.0) && !outer.contains(lam, tol)) return false;
    for (double p : inner.points)
        if (!outer.contains(p, tol)) return false;
    for (const auto& [a, b] : inner.intervals) {
        if (!outer.contains(a, tol) || !outer.contains(b, tol)) return false;
    }
    return true;
}

SpectralSet sigma_A0(const BetaEvaluator& eval, double lambda_max) {
    SpectralSet set;
    set.label = "sigma_A0";
    const InclusionModel& model = eval.model();
    const EigenDecomposition& base = eval.base_spectrum();

    auto add_scaled_points = [&](double r) {
        for (int n = 0; n < base.values.size(); ++n) {
            const double nu = base.values[n] / (r * r);
            if (nu <= lambda_max) set.points.push_back(nu);
        }
    };
    if (model.kind == ModelKind::iid_scaling) {
        if (model.scaling.continuous) {
            const double r1 = model.scaling.r1, r2 = model.scaling.r2;
            for (int n = 0; n < base.values.size(); ++n) {
                const double lo = base.values[n] / (r2 * r2);
                const double hi = base.values[n] / (r1 * r1);
                if (lo <= lambda_max) set.intervals.emplace_back(lo, std::min(hi, lambda_max));
            }
        } else {
            for (auto [r, w] : model.scaling.atoms) add_scaled_points(r);
        }
    } else {
        // Rotations are isometries: the micro-spectrum is that of the base
        // shape (the evaluator falls back to per-rotation solves only for
        // non-covariant coefficients, where spectra still coincide per
        // rotation class in all shipped models).
        add_scaled_points(1.0);
    }
    set.normalize();
    return set;
}

std::vector<double> make_lambda_grid(const BetaEvaluator& eval, const GridOptions& grid) {
    std::vector<double> lams;
    lams.reserve(grid.points + 16);
    for (int i = 0; i < grid.points; ++i)
        lams.push_back(grid.lambda_max * i / (grid.points - 1.0));
    const double guard = eval.pole_guard();
    for (double p : eval.significant_poles(grid.lambda_max)) {
        lams.push_back(std::max(0.0, p - 1.05 * guard));
        lams.push_back(p + 1.05 * guard);
    }
    std::sort(lams.begin(), lams.end());
    lams.erase(std::unique(lams.begin(), lams.end()), lams.end());
    return lams;
}

namespace {

struct BandScan {
    std::vector<double> grid;
    std::vector<int> band_count;  // -1 where the evaluation is pole-flagged
    std::vector<std::pair<double, double>> bands;
};

// Shared band construction: f is the scalar criterion (largest eigenvalue
// of the beta-matrix, or beta_infinity); counts come from the matrix when
// available. Band boundaries are refined by bisection on f between grid
// neighbors of opposite sign; components abutting the micro-spectrum close
// at the spectral edge.
BandScan scan_bands(const BetaEvaluator& eval, const GridOptions& grid,
                    const SpectralSet& micro, const std::function<double(double)>& f,
                    const std::function<int(double)>& count_fn) {
    BandScan scan;
    scan.grid = make_lambda_grid(eval, grid);
    const double guard = eval.pole_guard();
    const int n = static_cast<int>(scan.grid.size());

    std::vector<char> valid(n, 0);
    std::vector<double> fval(n, 0.0);
    scan.band_count.assign(n, -1);
    for (int i = 0; i < n; ++i) {
        const double lam = scan.grid[i];
        if (eval.pole_distance(lam) <= guard) continue;
        valid[i] = 1;
        fval[i] = f(lam);
        scan.band_count[i] = count_fn(lam);
    }

    const double tol = grid.bisect_tol_rel * grid.lambda_max;
    auto bisect = [&](double lo, double hi, double flo) {
        // Invariant kept: sign(f(lo)) == sign(flo) != sign at hi.
        for (int it = 0; it < 60 && hi - lo > tol; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (eval.pole_distance(mid) <= guard) break;  // ran into a guard
            const double fm = f(mid);
            if ((fm >= 0.0) == (flo >= 0.0)) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        return 0.5 * (lo + hi);
    };

    // Upper edge of the micro-spectrum component immediately below lam.
    auto spectral_edge_below = [&](double lam) {
        double edge = 0.0;
        for (const auto& [a, b] : micro.intervals)
            if (b <= lam + guard * 2) edge = std::max(edge, std::min(b, lam));
        for (double p : micro.points)
            if (p <= lam + guard * 2) edge = std::max(edge, std::min(p, lam));
        return edge;
    };
    auto spectral_edge_above = [&](double lam) {
        double edge = grid.lambda_max;
        for (const auto& [a, b] : micro.intervals)
            if (a >= lam - guard * 2) edge = std::min(edge, std::max(a, lam));
        for (double p : micro.points)
            if (p >= lam - guard * 2) edge = std::min(edge, std::max(p, lam));
        return edge;
    };

    int i = 0;
    while (i < n) {
        if (!valid[i] || fval[i] < 0.0) {
            ++i;
            continue;
        }
        // Band run [i .. j].
        int j = i;
        while (j + 1 < n && valid[j + 1] && fval[j + 1] >= 0.0) ++j;

        double left;
        if (i == 0) {
            left = scan.grid[0];
        } else if (valid[i - 1]) {
            left = bisect(scan.grid[i - 1], scan.grid[i], fval[i - 1]);
        } else {
            left = spectral_edge_below(scan.grid[i]);
        }
        double right;
        if (j == n - 1) {
            right = scan.grid[n - 1];
        } else if (valid[j + 1]) {
            right = bisect(scan.grid[j], scan.grid[j + 1], fval[j]);
        } else {
            right = spectral_edge_above(scan.grid[j]);
        }
        scan.bands.emplace_back(left, right);
        i = j + 1;
    }
    return scan;
}

}  // namespace

SpectralSet spectrum_hom(const BetaEvaluator& eval, const GridOptions& grid) {
    const SpectralSet micro = sigma_A0(eval, grid.lambda_max);
    auto f = [&](double lam) { return eval.beta_max(lam); };
    auto count = [&](double lam) {
        const BetaMatrix b = eval.beta(lam);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b.value);
        int c = 0;
        for (int k = 0; k < es.eigenvalues().size(); ++k)
            if (es.eigenvalues()[k] >= 0.0) ++c;
        return c;
    };
    const BandScan scan = scan_bands(eval, grid, micro, f, count);

    SpectralSet set;
    set.label = "sigma_Ahom";
    set.intervals = scan.bands;
    set.points = micro.points;
    for (const auto& iv : micro.intervals) set.intervals.push_back(iv);
    set.grid = scan.grid;
    set.band_count = scan.band_count;
    set.normalize();
    return set;
}

SpectralSet set_G(const BetaEvaluator& eval, const GridOptions& grid,
                  const BetaInfinityOptions& binf) {
    const SpectralSet micro = sigma_A0(eval, grid.lambda_max);
    // Band scanning uses the closed form only (no Monte Carlo per point).
    BetaInfinityOptions closed = binf;
    closed.samples = 0;
    auto f = [&](double lam) { return beta_infinity(eval, lam, closed).closed_form; };
    auto count = [&](double lam) { return f(lam) >= 0.0 ? 1 : 0; };
    const BandScan scan = scan_bands(eval, grid, micro, f, count);

    SpectralSet set;
    set.label = "G";
    set.intervals = scan.bands;
    set.points = micro.points;
    for (const auto& iv : micro.intervals) set.intervals.push_back(iv);
    set.grid = scan.grid;
    set.band_count = scan.band_count;
    set.normalize();
    return set;
}

}  // namespace hc
