#pragma once

#include "hclab/eigs.hpp"

#include <Eigen/Dense>

namespace hc {

/// One lambda-point of the inclusion resolvent: columns b^(i) solving
/// (A0^Q - lambda) b = e_i with Dirichlet boundary, and the response matrix
/// B_ij = integral over Q of b^(i) . e_j. B is symmetric because the pencil
/// is self-adjoint.
struct ResolventSample {
    double lambda = 0.0;
    Eigen::MatrixXd columns;  // n_dofs x block, nodal coefficients of b^(i)
    Eigen::MatrixXd B;        // block x block
    double pole_distance = 0.0;
};

struct ResolventOptions {
    double h = 1.0 / 32;
    bool scalar = false;
    double scalar_coefficient = 1.0;
    double pole_guard_rel = 1e-3;  // guard = rel * nu_1
    int spectrum_count = 24;       // modes consulted for the pole distance
    bool use_cache = true;
};

/// Direct resolvent solve on the shape mesh. Factorizes (K - lambda M) once
/// and back-solves the constant unit loads. Throws when lambda sits inside
/// the pole guard of the shape's Dirichlet spectrum, or on factorization
/// breakdown (advising a larger guard).
ResolventSample solve_b_lambda(const InclusionShape& shape, const ElasticityTensor& c0,
                               double lambda, const ResolventOptions& opt);

/// Same solve given prebuilt mesh/forms (used when the caller also needs
/// the fields, e.g. quasimode assembly).
ResolventSample solve_b_lambda_on(const AssembledForms& forms, double lambda,
                                  double pole_distance);

/// Truncated eigen-expansion of B(lambda) with the exact lambda=0 tail fold:
///   B(lambda) ~= B0 + lambda * sum_n m_n m_n^T / (nu_n (nu_n - lambda)),
/// where B0 = B(0) is supplied from a direct solve. Used as the independent
/// oracle for the direct resolvent path.
Eigen::MatrixXd resolvent_expansion(const EigenDecomposition& dec, const Eigen::MatrixXd& b0,
                                    double lambda);

}  // namespace hc
