#include "hclab/forms.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace hc {

namespace {

struct TriGeom {
    double area;
    // Constant P1 basis gradients.
    Eigen::Matrix<double, 2, 3> grad;
};

TriGeom tri_geometry(const Mesh& mesh, std::size_t t) {
    const Vec2& a = mesh.nodes[mesh.triangles[t][0]];
    const Vec2& b = mesh.nodes[mesh.triangles[t][1]];
    const Vec2& c = mesh.nodes[mesh.triangles[t][2]];
    const double det = (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
    TriGeom g;
    g.area = 0.5 * det;
    g.grad.col(0) << (b.y() - c.y()) / det, (c.x() - b.x()) / det;
    g.grad.col(1) << (c.y() - a.y()) / det, (a.x() - c.x()) / det;
    g.grad.col(2) << (a.y() - b.y()) / det, (b.x() - a.x()) / det;
    return g;
}

}  // namespace

AssembledForms assemble_forms(const Mesh& mesh, Physics physics,
                              const std::vector<Coefficient>& coefficients, BcKind bc) {
    const int block = physics == Physics::elasticity ? 2 : 1;
    const int n_nodes = mesh.count_nodes();

    for (const auto& c : coefficients) {
        if (physics == Physics::elasticity) {
            if (c.tensor.dim() != 2) throw std::invalid_argument("assemble: need d=2 tensors");
            if (c.tensor.ellipticity_constant() <= 0.0)
                throw std::invalid_argument("assemble: non-elliptic coefficient tensor");
        } else if (c.scalar <= 0.0) {
            throw std::invalid_argument("assemble: non-elliptic scalar coefficient");
        }
    }

    // Periodic identification first, then Dirichlet elimination.
    std::vector<int> rep(n_nodes);
    for (int i = 0; i < n_nodes; ++i) rep[i] = i;
    if (bc == BcKind::periodic) {
        for (int i = 0; i < n_nodes; ++i)
            if (mesh.node_master[i] >= 0) {
                int m = mesh.node_master[i];
                while (mesh.node_master[m] >= 0) m = mesh.node_master[m];
                rep[i] = m;
            }
    }

    AssembledForms forms;
    forms.block = block;
    forms.dof_of.assign(static_cast<std::size_t>(n_nodes) * block, -1);
    int next = 0;
    for (int i = 0; i < n_nodes; ++i) {
        if (rep[i] != i) continue;
        const bool constrained = (bc == BcKind::dirichlet) && mesh.node_dirichlet[i];
        for (int c = 0; c < block; ++c)
            forms.dof_of[i * block + c] = constrained ? -1 : next++;
    }
    for (int i = 0; i < n_nodes; ++i)
        if (rep[i] != i)
            for (int c = 0; c < block; ++c) forms.dof_of[i * block + c] = forms.dof_of[rep[i] * block + c];
    forms.n_dofs = next;

    std::vector<Eigen::Triplet<double>> kt, mt;
    kt.reserve(mesh.triangles.size() * 9 * block * block);
    mt.reserve(mesh.triangles.size() * 9 * block * block);
    forms.comp_integral = Eigen::MatrixXd::Zero(forms.n_dofs, block);

    std::vector<Eigen::MatrixXd> mandel;
    for (const auto& c : coefficients)
        mandel.push_back(physics == Physics::elasticity ? (c.tensor * c.factor).mandel()
                                                        : Eigen::MatrixXd());

    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        const int mat = mesh.tri_material[t];
        if (mat < 0 || mat >= static_cast<int>(coefficients.size()))
            throw std::invalid_argument("assemble: missing coefficient for material tag");
        const TriGeom g = tri_geometry(mesh, t);
        forms.volume += g.area;

        Eigen::MatrixXd ke, me;
        if (physics == Physics::scalar) {
            const double c = coefficients[mat].scalar * coefficients[mat].factor;
            ke = (c * g.area) * (g.grad.transpose() * g.grad);
            me = Eigen::MatrixXd::Constant(3, 3, g.area / 12.0);
            me.diagonal().setConstant(g.area / 6.0);
        } else {
            // Mandel strain-displacement matrix (rows e11, e22, sqrt2 e12).
            Eigen::MatrixXd b = Eigen::MatrixXd::Zero(3, 6);
            for (int i = 0; i < 3; ++i) {
                b(0, 2 * i) = g.grad(0, i);
                b(1, 2 * i + 1) = g.grad(1, i);
                b(2, 2 * i) = g.grad(1, i) * inv_sqrt2;
                b(2, 2 * i + 1) = g.grad(0, i) * inv_sqrt2;
            }
            ke = g.area * (b.transpose() * mandel[mat] * b);
            me = Eigen::MatrixXd::Zero(6, 6);
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) {
                    const double v = g.area * ((i == j) ? 1.0 / 6.0 : 1.0 / 12.0);
                    me(2 * i, 2 * j) = v;
                    me(2 * i + 1, 2 * j + 1) = v;
                }
        }

        std::array<int, 6> dofs{};
        for (int i = 0; i < 3; ++i)
            for (int c = 0; c < block; ++c)
                dofs[i * block + c] = forms.dof_of[mesh.triangles[t][i] * block + c];
        const int nloc = 3 * block;
        for (int i = 0; i < nloc; ++i) {
            if (dofs[i] < 0) continue;
            forms.comp_integral(dofs[i], i % block) += g.area / 3.0;
            for (int j = 0; j < nloc; ++j) {
                if (dofs[j] < 0) continue;
                kt.emplace_back(dofs[i], dofs[j], ke(i, j));
                mt.emplace_back(dofs[i], dofs[j], me(i, j));
            }
        }
    }

    forms.stiffness.resize(forms.n_dofs, forms.n_dofs);
    forms.stiffness.setFromTriplets(kt.begin(), kt.end());
    forms.mass.resize(forms.n_dofs, forms.n_dofs);
    forms.mass.setFromTriplets(mt.begin(), mt.end());
    // Symmetrize to kill the last-bit asymmetry from summation order.
    forms.stiffness = 0.5 * (Eigen::SparseMatrix<double>(forms.stiffness.transpose()) + forms.stiffness);
    forms.mass = 0.5 * (Eigen::SparseMatrix<double>(forms.mass.transpose()) + forms.mass);
    return forms;
}

AssembledForms assemble_scalar(const Mesh& mesh, double c, BcKind bc) {
    Coefficient k;
    k.scalar = c;
    return assemble_forms(mesh, Physics::scalar, {k, k}, bc);
}

AssembledForms assemble_elasticity(const Mesh& mesh, const ElasticityTensor& c, BcKind bc) {
    Coefficient k;
    k.tensor = c;
    return assemble_forms(mesh, Physics::elasticity, {k, k}, bc);
}

namespace {

// sym(grad u) on one triangle from nodal values on the free dofs
// (constrained dofs read as zero).
Eigen::Matrix2d element_sym_grad(const Mesh& mesh, const AssembledForms& forms,
                                 const Eigen::VectorXd& u, std::size_t t, const TriGeom& g) {
    Eigen::Matrix2d grad = Eigen::Matrix2d::Zero();
    for (int i = 0; i < 3; ++i)
        for (int c = 0; c < 2; ++c) {
            const int d = forms.dof(mesh.triangles[t][i], c);
            if (d < 0) continue;
            grad.row(c) += u[d] * g.grad.col(i).transpose();
        }
    return 0.5 * (grad + grad.transpose());
}

}  // namespace

Eigen::VectorXd constant_strain_load(const Mesh& mesh, const AssembledForms& forms,
                                     const ElasticityTensor& c, const Eigen::Matrix2d& xi) {
    if (forms.block != 2) throw std::invalid_argument("constant_strain_load: elasticity only");
    const Eigen::Matrix2d sigma = c.apply(0.5 * (xi + xi.transpose()));
    Eigen::VectorXd f = Eigen::VectorXd::Zero(forms.n_dofs);
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        const TriGeom g = tri_geometry(mesh, t);
        for (int i = 0; i < 3; ++i)
            for (int comp = 0; comp < 2; ++comp) {
                const int d = forms.dof(mesh.triangles[t][i], comp);
                if (d < 0) continue;
                // sigma . sym(grad phi) = sigma . grad phi by symmetry.
                f[d] -= g.area * sigma.row(comp).dot(g.grad.col(i));
            }
    }
    return f;
}

double strained_energy(const Mesh& mesh, const AssembledForms& forms, const ElasticityTensor& c,
                       const Eigen::Matrix2d& xi, const Eigen::VectorXd& u,
                       const Eigen::Matrix2d& eta, const Eigen::VectorXd& v) {
    double acc = 0.0;
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        const TriGeom g = tri_geometry(mesh, t);
        const Eigen::Matrix2d su = xi + element_sym_grad(mesh, forms, u, t, g);
        const Eigen::Matrix2d sv = eta + element_sym_grad(mesh, forms, v, t, g);
        acc += g.area * c.contract(su, sv);
    }
    return acc;
}

double sym_grad_norm_sq(const Mesh& mesh, const AssembledForms& forms, const Eigen::VectorXd& u) {
    double acc = 0.0;
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        const TriGeom g = tri_geometry(mesh, t);
        acc += g.area * element_sym_grad(mesh, forms, u, t, g).squaredNorm();
    }
    return acc;
}

Eigen::VectorXd interpolate_linear_field(const AssembledForms& forms, const Mesh& mesh,
                                         const Eigen::Matrix2d& xi) {
    if (forms.block != 2) throw std::invalid_argument("interpolate_linear_field: elasticity only");
    Eigen::VectorXd u = Eigen::VectorXd::Zero(forms.n_dofs);
    for (int n = 0; n < mesh.count_nodes(); ++n) {
        const Vec2 val = xi * mesh.nodes[n];
        for (int c = 0; c < 2; ++c) {
            const int d = forms.dof(n, c);
            if (d >= 0) u[d] = val[c];
        }
    }
    return u;
}

}  // namespace hc
