#include "hclab/resolvent.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

using namespace hc;

namespace {

constexpr double kPi = M_PI;

// Independent oracle for int b_0 on the unit square (scalar):
// sum over odd (m, n) of 64 / (pi^6 m^2 n^2 (m^2 + n^2)).
double sine_series_b0() {
    double sum = 0.0;
    for (int m = 301; m >= 1; m -= 2)
        for (int n = 301; n >= 1; n -= 2)
            sum += 64.0 / (std::pow(kPi, 6) * m * m * n * n * (m * m + n * n));
    return sum;
}

ResolventOptions scalar_opt(double h) {
    ResolventOptions opt;
    opt.scalar = true;
    opt.h = h;
    opt.use_cache = false;
    return opt;
}

}  // namespace

TEST_CASE("lambda=0 square resolvent matches the sine-series oracle to 1e-3") {
    const ResolventSample s = solve_b_lambda(square_shape(1.0), make_isotropic({0, 1}, 2), 0.0,
                                             scalar_opt(1.0 / 64));
    const double oracle = sine_series_b0();
    CHECK(std::abs(s.B(0, 0) - oracle) <= 1e-3);
}

TEST_CASE("lambda=0 elasticity response is symmetric positive definite") {
    ResolventOptions opt;
    opt.h = 1.0 / 128;
    opt.use_cache = false;
    const ResolventSample s =
        solve_b_lambda(disk_shape(0.2, 64), make_isotropic({1, 1}, 2), 0.0, opt);
    CHECK((s.B - s.B.transpose()).norm() <= 1e-9 * s.B.norm());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (s.B + s.B.transpose()));
    CHECK(es.eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("resolvent blows up like (m1.k)^2/(nu1 - lambda) toward the pole") {
    SpectrumOptions sopt;
    sopt.scalar = true;
    sopt.h = 1.0 / 64;
    sopt.count = 12;
    sopt.use_cache = false;
    const InclusionShape sq = square_shape(1.0);
    const ElasticityTensor c0 = make_isotropic({0, 1}, 2);
    const EigenDecomposition dec = dirichlet_spectrum(sq, c0, sopt);
    const double nu1 = dec.values[0];
    const double m1 = dec.moments(0, 0);

    for (double frac : {0.9, 0.95, 0.99}) {
        const double lam = frac * nu1;
        const ResolventSample s = solve_b_lambda(sq, c0, lam, scalar_opt(1.0 / 64));
        CHECK(s.B(0, 0) * (nu1 - lam) == doctest::Approx(m1 * m1).epsilon(0.05));
    }
}

TEST_CASE("eigen-expansion with the lambda=0 tail fold tracks the direct solve") {
    SpectrumOptions sopt;
    sopt.scalar = true;
    sopt.h = 1.0 / 48;
    sopt.count = 30;
    sopt.use_cache = false;
    const InclusionShape sq = square_shape(1.0);
    const ElasticityTensor c0 = make_isotropic({0, 1}, 2);
    const EigenDecomposition dec = dirichlet_spectrum(sq, c0, sopt);
    const ResolventSample b0 = solve_b_lambda(sq, c0, 0.0, scalar_opt(1.0 / 48));

    const double nu1 = dec.values[0];
    for (double lam : {0.3 * nu1, 0.7 * nu1, 1.2 * nu1, 2.5 * nu1}) {
        const ResolventSample s = solve_b_lambda(sq, c0, lam, scalar_opt(1.0 / 48));
        const Eigen::MatrixXd expanded = resolvent_expansion(dec, b0.B, lam);
        CHECK((s.B - expanded).norm() <= 1e-3);
    }
}

TEST_CASE("norm bound: |B| * dist(lambda, spectrum) bounded by a multiple of its median") {
    SpectrumOptions sopt;
    sopt.scalar = true;
    sopt.h = 1.0 / 32;
    sopt.count = 16;
    sopt.use_cache = false;
    const InclusionShape disk = disk_shape(0.45, 64);
    const ElasticityTensor c0 = make_isotropic({0, 1}, 2);
    const EigenDecomposition dec = dirichlet_spectrum(disk, c0, sopt);

    std::vector<double> products;
    for (double frac : {0.3, 0.6, 0.8, 0.9, 1.1, 1.3}) {
        const double lam = frac * dec.values[0];
        const ResolventSample s = solve_b_lambda(disk, c0, lam, scalar_opt(1.0 / 32));
        double dist = 1e300;
        for (int i = 0; i < dec.values.size(); ++i)
            dist = std::min(dist, std::abs(dec.values[i] - lam));
        products.push_back(std::abs(s.B(0, 0)) * dist);
    }
    std::vector<double> sorted = products;
    std::sort(sorted.begin(), sorted.end());
    const double median = sorted[sorted.size() / 2];
    for (double p : products) CHECK(p <= 20.0 * median);
}

TEST_CASE("pole guard rejects lambda on the spectrum") {
    SpectrumOptions sopt;
    sopt.scalar = true;
    sopt.h = 1.0 / 32;
    sopt.count = 4;
    sopt.use_cache = false;
    const EigenDecomposition dec =
        dirichlet_spectrum(square_shape(1.0), make_isotropic({0, 1}, 2), sopt);
    CHECK_THROWS_WITH_AS(solve_b_lambda(square_shape(1.0), make_isotropic({0, 1}, 2),
                                        dec.values[0], scalar_opt(1.0 / 32)),
                         doctest::Contains("pole guard"), std::runtime_error);
}

TEST_CASE("B(lambda) is symmetric on every sample") {
    const ElasticityTensor c0 = make_isotropic({1, 2}, 2);
    const InclusionShape rect = rectangle_shape(0.4, 0.2);
    ResolventOptions opt;
    opt.h = 1.0 / 96;
    opt.use_cache = false;
    for (double lam : {0.0, 30.0, 90.0}) {
        const ResolventSample s = solve_b_lambda(rect, c0, lam, opt);
        CHECK((s.B - s.B.transpose()).norm() <= 1e-9 * (s.B.norm() + 1.0));
    }
}
