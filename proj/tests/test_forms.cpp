#include "hclab/forms.hpp"

#include "hclab/eigs.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>

using namespace hc;

namespace {

double sparse_asym(const Eigen::SparseMatrix<double>& a) {
    const Eigen::SparseMatrix<double> at = a.transpose();
    return (Eigen::MatrixXd(a) - Eigen::MatrixXd(at)).norm() / Eigen::MatrixXd(a).norm();
}

}  // namespace

TEST_CASE("Galerkin symmetry of stiffness and mass") {
    const Mesh mesh = build_shape_mesh(disk_shape(0.2, 32), 0.03);
    const AssembledForms forms = assemble_elasticity(mesh, make_isotropic({1.0, 1.0}, 2),
                                                     BcKind::dirichlet);
    CHECK(sparse_asym(forms.stiffness) <= 1e-12);
    CHECK(sparse_asym(forms.mass) <= 1e-12);
}

TEST_CASE("rigid motions are in the unconstrained elasticity kernel") {
    const Mesh mesh = build_shape_mesh(disk_shape(0.2, 32), 0.03);
    const AssembledForms forms =
        assemble_elasticity(mesh, make_isotropic({1.0, 2.0}, 2), BcKind::none);
    // Constant translation + infinitesimal rotation.
    Eigen::VectorXd u = Eigen::VectorXd::Zero(forms.n_dofs);
    for (int n = 0; n < mesh.count_nodes(); ++n) {
        const Vec2 x = mesh.nodes[n];
        const Vec2 val(0.3 - 1.7 * x.y(), -0.8 + 1.7 * x.x());
        for (int c = 0; c < 2; ++c) u[forms.dof(n, c)] = val[c];
    }
    const double rel = (forms.stiffness * u).norm() /
                       (Eigen::MatrixXd(forms.stiffness).norm() * u.norm());
    CHECK(rel <= 1e-10);
}

TEST_CASE("linear strain field reproduces the exact energy on a torus") {
    InclusionModel m;
    m.kind = ModelKind::periodic_single;
    m.base_shape = square_shape(0.3);
    const Configuration cfg = generate_configuration(m, 2, 0);
    const Mesh mesh = build_two_phase_mesh(cfg, 1.0 / 8);

    const IsotropicModuli mod{0.7, 1.9};
    const ElasticityTensor c = make_isotropic(mod, 2);
    // Uniform coefficients on the torus; bc=none keeps the linear field
    // representable (it is not periodic).
    const AssembledForms forms = assemble_elasticity(mesh, c, BcKind::none);

    Eigen::Matrix2d xi;
    xi << 0.4, 0.3, -0.1, 0.9;
    const Eigen::VectorXd u = interpolate_linear_field(forms, mesh, xi);
    const Eigen::Matrix2d sym = 0.5 * (xi + xi.transpose());
    const double exact =
        forms.volume * (mod.c1 * sym.trace() * sym.trace() + mod.c2 * sym.squaredNorm());
    CHECK(u.dot(forms.stiffness * u) == doctest::Approx(exact).epsilon(1e-10));
}

TEST_CASE("kernel of the free elasticity operator has dimension 3") {
    const Mesh mesh = build_shape_mesh(square_shape(0.4), 0.05);
    const AssembledForms forms =
        assemble_elasticity(mesh, make_isotropic({1.0, 1.0}, 2), BcKind::none);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(forms.stiffness));
    int null_dim = 0;
    for (int i = 0; i < es.eigenvalues().size(); ++i)
        if (es.eigenvalues()[i] < 1e-9) ++null_dim;
    CHECK(null_dim == 3);
}

TEST_CASE("non-elliptic coefficients are rejected") {
    const Mesh mesh = build_shape_mesh(square_shape(0.4), 0.1);
    CHECK_THROWS(assemble_scalar(mesh, -1.0, BcKind::dirichlet));
    ElasticityTensor bad = make_isotropic({1.0, 1.0}, 2);
    bad.set(0, 1, 0, 1, -2.0);
    CHECK_THROWS(assemble_elasticity(mesh, bad, BcKind::dirichlet));
}

TEST_CASE("refinement decreases the first Dirichlet eigenvalue monotonically") {
    double prev = 1e300;
    for (double h : {1.0 / 8, 1.0 / 16, 1.0 / 32}) {
        const Mesh mesh = build_shape_mesh(square_shape(1.0), h);
        const AssembledForms forms = assemble_scalar(mesh, 1.0, BcKind::dirichlet);
        const EigenDecomposition dec = solve_eigs(forms, 1, 0.0);
        CHECK(dec.values[0] < prev);
        prev = dec.values[0];
    }
    CHECK(prev > 2 * M_PI * M_PI);  // conforming elements approximate from above
}
