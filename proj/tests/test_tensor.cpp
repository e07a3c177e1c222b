#include "hclab/tensor.hpp"

#include <doctest.h>

#include <random>

using namespace hc;

TEST_CASE("isotropic tensor acts as c1 tr(xi) I + c2 sym(xi)") {
    const ElasticityTensor c = make_isotropic({1.0, 2.0}, 2);
    const Eigen::Matrix2d id = Eigen::Matrix2d::Identity();
    CHECK((c.apply(id) - 4.0 * id).norm() == doctest::Approx(0.0));

    const ElasticityTensor c01 = make_isotropic({0.0, 1.0}, 2);
    Eigen::Matrix2d antisym;
    antisym << 0, 1, -1, 0;
    CHECK(c01.apply(antisym).norm() == doctest::Approx(0.0));

    const ElasticityTensor c3 = make_isotropic({1.0, 1.0}, 3);
    const Eigen::Matrix3d id3 = Eigen::Matrix3d::Identity();
    CHECK((c3.apply(id3) - 4.0 * id3).norm() == doctest::Approx(0.0));

    Eigen::Matrix2d diag;
    diag << 1, 0, 0, 0;
    Eigen::Matrix2d expect;
    expect << 3, 0, 0, 1;
    CHECK((c.apply(diag) - expect).norm() == doctest::Approx(0.0));
}

TEST_CASE("apply contracts and respects the minor symmetry") {
    const ElasticityTensor c = make_isotropic({0.7, 1.3}, 2);
    CHECK(c.apply(Eigen::Matrix2d::Zero()).norm() == 0.0);

    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        Eigen::Matrix2d xi;
        xi << u(rng), u(rng), u(rng), u(rng);
        const Eigen::Matrix2d sym = 0.5 * (xi + xi.transpose());
        CHECK((c.apply(xi) - c.apply(sym)).norm() < 1e-14);
        // Linearity.
        Eigen::Matrix2d eta;
        eta << u(rng), u(rng), u(rng), u(rng);
        CHECK((c.apply(xi + 2.0 * eta) - c.apply(xi) - 2.0 * c.apply(eta)).norm() < 1e-13);
        // Major symmetry as a bilinear identity on symmetric arguments.
        const Eigen::Matrix2d seta = 0.5 * (eta + eta.transpose());
        CHECK(c.contract(sym, seta) == doctest::Approx(c.contract(seta, sym)).epsilon(1e-12));
    }
}

TEST_CASE("rejects bad moduli and dimensions") {
    CHECK_THROWS(make_isotropic({1.0, 2.0}, 4));
    CHECK_THROWS(make_isotropic({1.0, 0.0}, 2));
    CHECK_THROWS(make_isotropic({-0.5, 1.0}, 2));
}

TEST_CASE("ellipticity constant is the smallest Mandel eigenvalue") {
    CHECK(make_isotropic({0.0, 1.0}, 2).ellipticity_constant() == doctest::Approx(1.0));
    // Mandel eigenvalues for (c1, c2) = (1, 1) in d=2 are {1, 1, 1 + 2 c1}.
    CHECK(make_isotropic({1.0, 1.0}, 2).ellipticity_constant() == doctest::Approx(1.0));

    // Zeroed shear block: energy vanishes on a symmetric direction.
    ElasticityTensor broken = make_isotropic({1.0, 1.0}, 2);
    broken.set(0, 1, 0, 1, -1.0);
    CHECK(broken.ellipticity_constant() < 0.0);

    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    for (int trial = 0; trial < 10; ++trial) {
        const double c1 = u(rng), c2 = u(rng) + 0.1;
        CHECK(make_isotropic({c1, c2}, 2).ellipticity_constant() >= c2 - 1e-12);
    }
}

TEST_CASE("symmetry round-trip is bit-exact") {
    ElasticityTensor t(2);
    t.set(0, 1, 1, 1, 0.123456789);
    CHECK(t(0, 1, 1, 1) == 0.123456789);
    CHECK(t(1, 0, 1, 1) == 0.123456789);
    CHECK(t(1, 1, 0, 1) == 0.123456789);
    CHECK(t(1, 1, 1, 0) == 0.123456789);
    CHECK(t.has_symmetries());
}

TEST_CASE("component serialization round-trips") {
    const ElasticityTensor c = make_isotropic({0.4, 1.7}, 2);
    const ElasticityTensor back = ElasticityTensor::from_components(2, c.components());
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int m = 0; m < 2; ++m)
                for (int n = 0; n < 2; ++n) CHECK(back(a, b, m, n) == c(a, b, m, n));
}

TEST_CASE("mandel reconstruction inverts mandel()") {
    const ElasticityTensor c = make_isotropic({0.9, 2.1}, 2);
    const ElasticityTensor back = tensor_from_mandel(c.mandel(), 2);
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int m = 0; m < 2; ++m)
                for (int n = 0; n < 2; ++n)
                    CHECK(back(a, b, m, n) == doctest::Approx(c(a, b, m, n)).epsilon(1e-14));
}
