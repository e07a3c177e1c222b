#include "hclab/tensor.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

namespace hc {

ElasticityTensor::ElasticityTensor(int dim) : dim_(dim) {
    if (dim != 2 && dim != 3)
        throw std::invalid_argument("ElasticityTensor: dimension must be 2 or 3");
    comp_.assign(static_cast<size_t>(dim * dim * dim * dim), 0.0);
}

void ElasticityTensor::set(int a, int b, int m, int n, double value) {
    // One value lands in all symmetry-equivalent slots, so reads satisfy
    // both relations bit-exactly.
    comp_[idx(a, b, m, n)] = value;
    comp_[idx(a, b, n, m)] = value;
    comp_[idx(b, a, m, n)] = value;
    comp_[idx(b, a, n, m)] = value;
    comp_[idx(m, n, a, b)] = value;
    comp_[idx(n, m, a, b)] = value;
    comp_[idx(m, n, b, a)] = value;
    comp_[idx(n, m, b, a)] = value;
}

Eigen::MatrixXd ElasticityTensor::apply(const Eigen::MatrixXd& xi) const {
    if (xi.rows() != dim_ || xi.cols() != dim_)
        throw std::invalid_argument("ElasticityTensor::apply: shape mismatch");
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(dim_, dim_);
    for (int a = 0; a < dim_; ++a)
        for (int b = 0; b < dim_; ++b) {
            double s = 0.0;
            for (int m = 0; m < dim_; ++m)
                for (int n = 0; n < dim_; ++n) s += comp_[idx(a, b, m, n)] * xi(m, n);
            out(a, b) = s;
        }
    return out;
}

double ElasticityTensor::contract(const Eigen::MatrixXd& xi, const Eigen::MatrixXd& eta) const {
    return (apply(xi).array() * eta.array()).sum();
}

std::vector<Eigen::MatrixXd> symmetric_basis(int dim) {
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    std::vector<Eigen::MatrixXd> basis;
    for (int i = 0; i < dim; ++i) {
        Eigen::MatrixXd e = Eigen::MatrixXd::Zero(dim, dim);
        e(i, i) = 1.0;
        basis.push_back(e);
    }
    for (int i = 0; i < dim; ++i)
        for (int j = i + 1; j < dim; ++j) {
            Eigen::MatrixXd e = Eigen::MatrixXd::Zero(dim, dim);
            e(i, j) = e(j, i) = inv_sqrt2;
            basis.push_back(e);
        }
    return basis;
}

Eigen::MatrixXd ElasticityTensor::mandel() const {
    auto basis = symmetric_basis(dim_);
    const int m = static_cast<int>(basis.size());
    Eigen::MatrixXd v(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) v(i, j) = contract(basis[j], basis[i]);
    return v;
}

double ElasticityTensor::ellipticity_constant() const {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(mandel());
    return es.eigenvalues().minCoeff();
}

bool ElasticityTensor::has_symmetries(double tol) const {
    for (int a = 0; a < dim_; ++a)
        for (int b = 0; b < dim_; ++b)
            for (int m = 0; m < dim_; ++m)
                for (int n = 0; n < dim_; ++n) {
                    const double c = comp_[idx(a, b, m, n)];
                    if (std::abs(c - comp_[idx(m, n, a, b)]) > tol) return false;
                    if (std::abs(c - comp_[idx(a, b, n, m)]) > tol) return false;
                }
    return true;
}

ElasticityTensor ElasticityTensor::from_components(int dim, const std::vector<double>& comp) {
    ElasticityTensor t(dim);
    if (comp.size() != t.comp_.size())
        throw std::invalid_argument("ElasticityTensor::from_components: wrong length");
    t.comp_ = comp;
    if (!t.has_symmetries(0.0))
        throw std::invalid_argument("ElasticityTensor::from_components: symmetries violated");
    return t;
}

ElasticityTensor ElasticityTensor::operator+(const ElasticityTensor& other) const {
    if (dim_ != other.dim_) throw std::invalid_argument("tensor dim mismatch");
    ElasticityTensor t(dim_);
    for (size_t i = 0; i < comp_.size(); ++i) t.comp_[i] = comp_[i] + other.comp_[i];
    return t;
}

ElasticityTensor ElasticityTensor::operator*(double s) const {
    ElasticityTensor t(dim_);
    for (size_t i = 0; i < comp_.size(); ++i) t.comp_[i] = comp_[i] * s;
    return t;
}

ElasticityTensor tensor_from_mandel(const Eigen::MatrixXd& v, int dim) {
    const auto basis = symmetric_basis(dim);
    const int m = static_cast<int>(basis.size());
    if (v.rows() != m || v.cols() != m)
        throw std::invalid_argument("tensor_from_mandel: size mismatch");
    std::vector<double> comp(static_cast<std::size_t>(dim * dim * dim * dim), 0.0);
    auto idx = [dim](int a, int b, int mm, int n) {
        return ((a * dim + b) * dim + mm) * dim + n;
    };
    for (int i = 0; i < m; ++i)
        for (int j = i; j < m; ++j) {
            const double vij = 0.5 * (v(i, j) + v(j, i));
            for (int a = 0; a < dim; ++a)
                for (int b = 0; b < dim; ++b)
                    for (int mm = 0; mm < dim; ++mm)
                        for (int n = 0; n < dim; ++n) {
                            double w = basis[i](a, b) * basis[j](mm, n);
                            if (i != j) w += basis[j](a, b) * basis[i](mm, n);
                            comp[idx(a, b, mm, n)] += vij * w;
                        }
        }
    return ElasticityTensor::from_components(dim, comp);
}

ElasticityTensor make_isotropic(const IsotropicModuli& m, int dim) {
    if (dim != 2 && dim != 3)
        throw std::invalid_argument("make_isotropic: dimension must be 2 or 3");
    if (!(m.c2 > 0.0) || m.c1 < 0.0)
        throw std::invalid_argument("make_isotropic: requires c2 > 0 and c1 >= 0");
    ElasticityTensor t(dim);
    for (int a = 0; a < dim; ++a)
        for (int b = a; b < dim; ++b)
            for (int mm = 0; mm < dim; ++mm)
                for (int n = mm; n < dim; ++n) {
                    const double v = m.c1 * (a == b) * (mm == n) +
                                     0.5 * m.c2 * ((a == mm) * (b == n) + (a == n) * (b == mm));
                    if (v != 0.0) t.set(a, b, mm, n, v);
                }
    return t;
}

}  // namespace hc
