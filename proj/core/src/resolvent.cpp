#include "hclab/resolvent.hpp"

#include <Eigen/SparseLU>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace hc {

ResolventSample solve_b_lambda_on(const AssembledForms& forms, double lambda,
                                  double pole_distance) {
    const int block = forms.block;
    Eigen::SparseMatrix<double> A = forms.stiffness - lambda * forms.mass;
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(A);
    if (lu.info() != Eigen::Success)
        throw std::runtime_error(
            "solve_b_lambda: factorization breakdown near a pole; increase pole_guard");

    ResolventSample sample;
    sample.lambda = lambda;
    sample.pole_distance = pole_distance;
    sample.columns.resize(forms.n_dofs, block);
    sample.B.resize(block, block);
    for (int i = 0; i < block; ++i) {
        const Eigen::VectorXd rhs = forms.comp_integral.col(i);
        const Eigen::VectorXd b = lu.solve(rhs);
        const double res = (A * b - rhs).norm();
        if (res > 1e-9 * std::max(rhs.norm(), 1e-300))
            throw std::runtime_error("solve_b_lambda: residual above tolerance");
        sample.columns.col(i) = b;
        for (int j = 0; j < block; ++j) sample.B(i, j) = forms.comp_integral.col(j).dot(b);
    }
    return sample;
}

ResolventSample solve_b_lambda(const InclusionShape& shape, const ElasticityTensor& c0,
                               double lambda, const ResolventOptions& opt) {
    SpectrumOptions sopt;
    sopt.h = opt.h;
    sopt.count = opt.spectrum_count;
    sopt.scalar = opt.scalar;
    sopt.scalar_coefficient = opt.scalar_coefficient;
    sopt.use_cache = opt.use_cache;
    const EigenDecomposition dec = dirichlet_spectrum(shape, c0, sopt);

    double dist = std::numeric_limits<double>::infinity();
    for (int i = 0; i < dec.values.size(); ++i)
        dist = std::min(dist, std::abs(dec.values[i] - lambda));
    const double guard = opt.pole_guard_rel * dec.values[0];
    if (dist <= guard)
        throw std::runtime_error("solve_b_lambda: lambda inside the pole guard");

    const Mesh mesh = build_shape_mesh(shape, opt.h);
    const AssembledForms forms =
        opt.scalar ? assemble_scalar(mesh, opt.scalar_coefficient, BcKind::dirichlet)
                   : assemble_elasticity(mesh, c0, BcKind::dirichlet);
    return solve_b_lambda_on(forms, lambda, dist);
}

Eigen::MatrixXd resolvent_expansion(const EigenDecomposition& dec, const Eigen::MatrixXd& b0,
                                    double lambda) {
    Eigen::MatrixXd out = b0;
    for (int n = 0; n < dec.values.size(); ++n) {
        const double nu = dec.values[n];
        const Eigen::VectorXd m = dec.moments.row(n);
        out += lambda / (nu * (nu - lambda)) * (m * m.transpose());
    }
    return out;
}

}  // namespace hc
