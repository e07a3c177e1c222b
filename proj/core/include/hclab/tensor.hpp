#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

namespace hc {

/// Coefficients of an isotropic stiffness law  C xi = c1 tr(xi) I + c2 sym(xi).
/// c2 > 0 and c1 >= 0 guarantee ellipticity on symmetric matrices.
struct IsotropicModuli {
    double c1 = 0.0;
    double c2 = 1.0;
};

/// Constant fourth-order elasticity tensor with major and minor symmetries,
///   C_{abmn} = C_{mnab},  C_{abmn} = C_{abnm},
/// stored both as the full d^4 component array and as its matrix
/// representation on the space of symmetric d x d matrices (orthonormal
/// Mandel basis), the latter used for spectral queries.
class ElasticityTensor {
public:
    ElasticityTensor() : dim_(2) { comp_.assign(16, 0.0); }
    explicit ElasticityTensor(int dim);

    int dim() const { return dim_; }

    /// Component access; writes enforce both symmetries bit-exactly by
    /// storing the same value in every symmetry-equivalent slot.
    double operator()(int a, int b, int m, int n) const {
        return comp_[idx(a, b, m, n)];
    }
    void set(int a, int b, int m, int n, double value);

    /// Contraction (C xi)_{ab} = C_{abmn} xi_{mn}.
    Eigen::MatrixXd apply(const Eigen::MatrixXd& xi) const;

    /// Energy density C xi . eta = C_{abmn} xi_{mn} eta_{ab}.
    double contract(const Eigen::MatrixXd& xi, const Eigen::MatrixXd& eta) const;

    /// Matrix of the tensor on symmetric matrices in the orthonormal basis
    /// {e_i x e_i} u {(e_i x e_j + e_j x e_i)/sqrt(2)}; size m = d(d+1)/2.
    Eigen::MatrixXd mandel() const;

    /// Smallest eigenvalue of mandel(); > 0 iff the ellipticity condition
    /// C xi . xi >= c |xi|^2 holds on symmetric matrices.
    double ellipticity_constant() const;

    bool has_symmetries(double tol = 0.0) const;

    /// Flat component array in row-major (a,b,m,n) index order; the
    /// serialization order used by the JSON schema.
    const std::vector<double>& components() const { return comp_; }
    static ElasticityTensor from_components(int dim, const std::vector<double>& comp);

    ElasticityTensor operator+(const ElasticityTensor& other) const;
    ElasticityTensor operator*(double s) const;

private:
    int idx(int a, int b, int m, int n) const {
        return ((a * dim_ + b) * dim_ + m) * dim_ + n;
    }
    int dim_;
    std::vector<double> comp_;
};

/// Builds the isotropic tensor C xi = c1 tr(xi) I + c2 sym(xi) in dimension
/// d in {2,3}. Throws std::invalid_argument for other d or non-elliptic
/// moduli (c2 <= 0 or c1 < 0).
ElasticityTensor make_isotropic(const IsotropicModuli& m, int dim);

/// Orthonormal basis of symmetric d x d matrices matching mandel() ordering.
std::vector<Eigen::MatrixXd> symmetric_basis(int dim);

/// Reconstructs the fourth-order tensor from its matrix on the symmetric
/// subspace (inverse of mandel() for tensors with both symmetries). The
/// accumulation order keeps the stored symmetries bit-exact.
ElasticityTensor tensor_from_mandel(const Eigen::MatrixXd& v, int dim);

}  // namespace hc
