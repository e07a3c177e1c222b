#include "hclab/dispersion.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hc {

Eigen::Matrix2d acoustic_matrix(const ElasticityTensor& c, const Eigen::Vector2d& k_hat) {
    Eigen::Matrix2d a = Eigen::Matrix2d::Zero();
    for (int al = 0; al < 2; ++al)
        for (int be = 0; be < 2; ++be)
            for (int mu = 0; mu < 2; ++mu)
                for (int nu = 0; nu < 2; ++nu)
                    a(al, be) += c(al, mu, nu, be) * k_hat[mu] * k_hat[nu];
    return a;
}

DispersionSolution dispersion(double lambda, const Eigen::Vector2d& k_hat,
                              const ElasticityTensor& chom, const BetaMatrix& beta) {
    if (beta.value.rows() != 2)
        throw std::invalid_argument("dispersion: needs the elasticity (2x2) beta-matrix");
    if (std::abs(k_hat.norm() - 1.0) > 1e-12)
        throw std::invalid_argument("dispersion: k_hat must be a unit vector");

    const Eigen::Matrix2d a = acoustic_matrix(chom, k_hat);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> ea(a);
    if (ea.eigenvalues().minCoeff() <= 0.0)
        throw std::invalid_argument("dispersion: acoustic matrix not positive definite");

    // r^2 are the nonnegative eigenvalues of A^{-1/2} beta A^{-1/2}; the
    // polarizations are the back-transformed eigenvectors.
    const Eigen::Matrix2d a_inv_sqrt =
        ea.eigenvectors() *
        ea.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
        ea.eigenvectors().transpose();
    const Eigen::Matrix2d reduced = a_inv_sqrt * beta.value * a_inv_sqrt;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> er(0.5 * (reduced + reduced.transpose()));

    DispersionSolution sol;
    sol.lambda = lambda;
    sol.direction = k_hat;
    for (int i = 0; i < 2; ++i) {
        const double mu = er.eigenvalues()[i];
        if (mu < 0.0) continue;
        Eigen::Vector2d c = a_inv_sqrt * er.eigenvectors().col(i);
        c.normalize();
        sol.roots.emplace_back(std::sqrt(mu), c);
    }
    std::sort(sol.roots.begin(), sol.roots.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });
    return sol;
}

}  // namespace hc
