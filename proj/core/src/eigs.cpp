#include "hclab/eigs.hpp"

#include "hclab/cache.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace hc {

namespace {

constexpr int kMatvecBudget = 500;
constexpr double kResidualTol = 1e-9;

struct ShiftedSolver {
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    bool use_lu = false;

    void factorize(const Eigen::SparseMatrix<double>& a) {
        ldlt.compute(a);
        if (ldlt.info() == Eigen::Success) return;
        use_lu = true;
        lu.compute(a);
        if (lu.info() != Eigen::Success)
            throw std::runtime_error("solve_eigs: shifted factorization failed");
    }
    Eigen::VectorXd solve(const Eigen::VectorXd& b) const {
        if (use_lu) return lu.solve(b);
        return ldlt.solve(b);
    }
};

// Sylvester inertia: the number of pencil eigenvalues below t equals the
// number of negative pivots of LDL^T applied to (K - t M). Used to verify
// that the collected set is complete (no multiple-eigenvalue copy missed).
int inertia_below(const Eigen::SparseMatrix<double>& K, const Eigen::SparseMatrix<double>& M,
                  double t) {
    for (int attempt = 0; attempt < 4; ++attempt) {
        const double tt = t * (1.0 + attempt * 3e-9) + attempt * 1e-14;
        Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
        ldlt.compute(Eigen::SparseMatrix<double>(K - tt * M));
        if (ldlt.info() != Eigen::Success) continue;
        const Eigen::VectorXd d = ldlt.vectorD();
        if (!d.allFinite()) continue;
        int neg = 0;
        for (int i = 0; i < d.size(); ++i)
            if (d[i] < 0.0) ++neg;
        return neg;
    }
    return -1;  // indeterminate; caller skips the check
}

}  // namespace

EigenDecomposition solve_eigs(const AssembledForms& forms, int count, double shift,
                              std::uint64_t seed) {
    if (count < 1) throw std::invalid_argument("solve_eigs: count >= 1");
    const int n = forms.n_dofs;
    if (count > n) throw std::invalid_argument("solve_eigs: count exceeds dof count");

    const Eigen::SparseMatrix<double>& K = forms.stiffness;
    const Eigen::SparseMatrix<double>& M = forms.mass;

    ShiftedSolver solver;
    {
        Eigen::SparseMatrix<double> A = K - shift * M;
        solver.factorize(A);
    }

    const int m_max = std::min(n, std::max(2 * count + 32, 64));
    Eigen::MatrixXd V(n, m_max);       // M-orthonormal Lanczos basis
    Eigen::MatrixXd MV(n, m_max);      // M * basis, kept for reorthogonalization
    Eigen::VectorXd alpha(m_max), beta(m_max);

    // Scale reference for the kernel-mode residual floor.
    double k_diag_scale = 0.0;
    for (int i = 0; i < n; ++i) k_diag_scale = std::max(k_diag_scale, std::abs(K.coeff(i, i)));

    // Converged pairs, M-orthonormal. Deflated restarts (Lanczos vectors
    // kept M-orthogonal to this set) pick up the remaining copies of
    // multiple eigenvalues that a single Krylov sweep cannot see.
    const int capacity = count + 8;
    Eigen::MatrixXd phi(n, capacity), mphi(n, capacity);
    Eigen::VectorXd values(capacity);
    int n_conv = 0;
    int matvecs = 0;
    std::uint64_t state = seed;

    auto true_residual_ok = [&](double nu, const Eigen::VectorXd& v) {
        const Eigen::VectorXd r = K * v - nu * (M * v);
        const double tol = 1e-8 * std::abs(nu) * (M * v).norm() + 1e-9 * k_diag_scale * v.norm();
        return r.norm() <= tol;
    };

    auto collect = [&](int target) {
    while (n_conv < target && matvecs < kMatvecBudget) {
        // Fresh start vector, M-orthogonal to the converged set.
        Eigen::VectorXd v(n);
        for (int i = 0; i < n; ++i) v[i] = 2.0 * uniform01(state) - 1.0;
        if (n_conv > 0) v -= phi.leftCols(n_conv) * (mphi.leftCols(n_conv).transpose() * v);
        Eigen::VectorXd mv = M * v;
        v /= std::sqrt(v.dot(mv));
        V.col(0) = v;
        MV.col(0) = M * v;

        int m = 0;
        Eigen::VectorXd ritz;
        Eigen::MatrixXd ritz_vec;
        const int want = target - n_conv;
        int accepted_this_sweep = 0;
        while (m < m_max && matvecs < kMatvecBudget) {
            Eigen::VectorXd w = solver.solve(MV.col(m));
            ++matvecs;
            alpha[m] = w.dot(MV.col(m));
            w -= alpha[m] * V.col(m);
            if (m > 0) w -= beta[m - 1] * V.col(m - 1);
            // Full reorthogonalization (twice) against basis + converged set.
            for (int pass = 0; pass < 2; ++pass) {
                w -= V.leftCols(m + 1) * (MV.leftCols(m + 1).transpose() * w);
                if (n_conv > 0)
                    w -= phi.leftCols(n_conv) * (mphi.leftCols(n_conv).transpose() * w);
            }
            Eigen::VectorXd mw = M * w;
            const double b = std::sqrt(std::max(0.0, w.dot(mw)));
            beta[m] = b;
            ++m;

            Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
            for (int i = 0; i < m; ++i) {
                T(i, i) = alpha[i];
                if (i + 1 < m) T(i, i + 1) = T(i + 1, i) = beta[i];
            }
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
            ritz = es.eigenvalues();
            ritz_vec = es.eigenvectors();

            // Leading candidates by the cheap bound, then the true check.
            int gate_ok = 0;
            for (int i = 0; i < std::min(want, m); ++i) {
                const int col = m - 1 - i;
                if (ritz[col] <= 0.0) break;
                const double bound = std::abs(b * ritz_vec(m - 1, col));
                if (b == 0.0 || bound <= kResidualTol * std::max(ritz[col], 1e-30)) ++gate_ok;
                else break;
            }
            if (gate_ok == 0 && b != 0.0 && m < m_max) {
                V.col(m) = w / b;
                MV.col(m) = mw / b;
                continue;
            }
            // Accept the maximal leading run passing the true residual.
            accepted_this_sweep = 0;
            for (int i = 0; i < gate_ok; ++i) {
                const int col = m - 1 - i;
                const double nu = shift + 1.0 / ritz[col];
                Eigen::VectorXd cand = V.leftCols(m) * ritz_vec.col(col);
                cand /= std::sqrt(cand.dot(M * cand));
                if (!true_residual_ok(nu, cand)) break;
                values[n_conv + accepted_this_sweep] = nu;
                phi.col(n_conv + accepted_this_sweep) = cand;
                mphi.col(n_conv + accepted_this_sweep) = M * cand;
                ++accepted_this_sweep;
            }
            if (accepted_this_sweep >= want || b == 0.0 || m >= m_max) break;
            if (accepted_this_sweep > 0 && gate_ok < want) {
                // Not all wanted pairs in this sweep yet; keep extending.
                accepted_this_sweep = 0;
                V.col(m) = w / b;
                MV.col(m) = mw / b;
                continue;
            }
            if (m < m_max) {
                V.col(m) = w / b;
                MV.col(m) = mw / b;
            }
        }
        if (accepted_this_sweep == 0) break;  // no progress: give up
        n_conv += accepted_this_sweep;
    }
    };  // collect

    collect(count);
    if (n_conv < count) {
        std::ostringstream os;
        os << "solve_eigs: only " << n_conv << "/" << count
           << " eigenpairs converged within the iteration budget";
        throw std::runtime_error(os.str());
    }

    // Completeness verification by spectrum slicing: the number of pencil
    // eigenvalues below a test point just under the largest returned value
    // must match the held set; a mismatch means a copy of a multiple
    // eigenvalue was missed, which a deflated sweep then recovers.
    std::vector<int> order;
    for (int round = 0; round < 6; ++round) {
        order.resize(n_conv);
        for (int i = 0; i < n_conv; ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](int a, int b) { return values[a] < values[b]; });
        const double top = values[order[count - 1]];
        const double delta = std::max(1e-7 * std::abs(top), 1e-9 * k_diag_scale);
        const double t = top - delta;
        int expected = 0;
        for (int i = 0; i < n_conv; ++i)
            if (values[i] < t) ++expected;
        const int actual = inertia_below(K, M, t);
        if (actual < 0 || actual <= expected) break;  // verified (or indeterminate)
        if (n_conv + (actual - expected) > capacity || matvecs >= kMatvecBudget) break;
        collect(n_conv + (actual - expected));
    }

    EigenDecomposition dec;
    dec.count_requested = count;
    dec.count_converged = count;
    order.resize(n_conv);
    for (int i = 0; i < n_conv; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) { return values[a] < values[b]; });
    dec.values.resize(count);
    dec.vectors.resize(n, count);
    for (int i = 0; i < count; ++i) {
        dec.values[i] = values[order[i]];
        dec.vectors.col(i) = phi.col(order[i]);
    }

    dec.moments.resize(count, forms.block);
    for (int i = 0; i < count; ++i)
        for (int c = 0; c < forms.block; ++c)
            dec.moments(i, c) = forms.comp_integral.col(c).dot(dec.vectors.col(i));
    return dec;
}

std::string spectrum_key(const InclusionShape& shape, const ElasticityTensor& c0,
                         const SpectrumOptions& opt) {
    std::ostringstream os;
    os.precision(17);
    os << shape.id;
    for (const auto& v : shape.boundary) os << "," << v.x() << "," << v.y();
    os << ";phys=" << (opt.scalar ? "s" : "e");
    if (opt.scalar)
        os << ";c=" << opt.scalar_coefficient;
    else
        for (double c : c0.components()) os << "," << c;
    os << ";h=" << opt.h << ";count=" << opt.count;
    return fnv1a_hex(os.str());
}

EigenDecomposition dirichlet_spectrum(const InclusionShape& shape, const ElasticityTensor& c0,
                                      const SpectrumOptions& opt) {
    const std::string key = spectrum_key(shape, c0, opt);
    if (opt.use_cache) {
        if (auto hit = EigenCache::instance().load(key)) {
            hit->shape_key = key;
            return *hit;
        }
    }
    const Mesh mesh = build_shape_mesh(shape, opt.h);
    AssembledForms forms = opt.scalar
                               ? assemble_scalar(mesh, opt.scalar_coefficient, BcKind::dirichlet)
                               : assemble_elasticity(mesh, c0, BcKind::dirichlet);
    EigenDecomposition dec = solve_eigs(forms, opt.count, 0.0);
    dec.shape_key = key;
    if (opt.use_cache) EigenCache::instance().store(key, dec, opt.h);
    return dec;
}

}  // namespace hc
