#pragma once

#include "hclab/forms.hpp"
#include "hclab/geometry.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace hc {

/// Dirichlet (or periodic) eigenpairs of the generalized pencil K phi = nu M phi.
/// Eigenvalues ascend; vectors are M-orthonormal. `moments` holds
/// m_n = integral of phi_n against each unit component field (a d-vector per
/// mode for elasticity, a scalar for scalar physics).
struct EigenDecomposition {
    Eigen::VectorXd values;
    Eigen::MatrixXd vectors;  // may be empty on a disk-cache hit
    Eigen::MatrixXd moments;  // count x block
    int count_requested = 0;
    int count_converged = 0;
    std::string shape_key;

    bool has_vectors() const { return vectors.size() > 0; }
};

/// Shift-invert Lanczos with full reorthogonalization in the M inner
/// product. Returns the `count` eigenvalues nearest above `shift`.
/// Deterministic for a fixed `seed`. Throws (carrying the converged count)
/// if the iteration budget is exhausted.
EigenDecomposition solve_eigs(const AssembledForms& forms, int count, double shift,
                              std::uint64_t seed = 0x5eed);

struct SpectrumOptions {
    double h = 1.0 / 32;
    int count = 24;
    bool scalar = false;
    double scalar_coefficient = 1.0;
    bool use_cache = true;
};

/// Dirichlet spectrum of the micro-operator -div C0 grad on a single
/// inclusion shape: meshes the shape interior, assembles, solves at shift 0
/// and extracts moments. Results are cached by a content hash of
/// (shape, physics, coefficient, h, count).
EigenDecomposition dirichlet_spectrum(const InclusionShape& shape, const ElasticityTensor& c0,
                                      const SpectrumOptions& opt);

/// Content hash covering everything the Dirichlet solve depends on.
std::string spectrum_key(const InclusionShape& shape, const ElasticityTensor& c0,
                         const SpectrumOptions& opt);

}  // namespace hc
