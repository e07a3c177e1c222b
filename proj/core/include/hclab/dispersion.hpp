#pragma once

#include "hclab/beta.hpp"

namespace hc {

/// Propagating branches at frequency-squared lambda along direction k_hat:
/// wavenumbers r solving det(r^2 (k . Chom . k) - beta(lambda)) = 0 with
/// polarizations c in the kernel. Empty when beta(lambda) is negative
/// definite (gap direction).
struct DispersionSolution {
    double lambda = 0.0;
    Eigen::Vector2d direction;
    std::vector<std::pair<double, Eigen::Vector2d>> roots;  // (r, polarization), ascending r
};

/// Acoustic-tensor contraction (k . C . k)_{ab} = C_{a mu nu b} k_mu k_nu.
Eigen::Matrix2d acoustic_matrix(const ElasticityTensor& c, const Eigen::Vector2d& k_hat);

DispersionSolution dispersion(double lambda, const Eigen::Vector2d& k_hat,
                              const ElasticityTensor& chom, const BetaMatrix& beta);

}  // namespace hc
