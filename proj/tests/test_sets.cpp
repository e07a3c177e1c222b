#include "hclab/sets.hpp"

#include "hclab/dispersion.hpp"

#include <doctest.h>

#include <cmath>

using namespace hc;

namespace {

PhysicsSpec scalar_phys() {
    PhysicsSpec p;
    p.scalar = true;
    return p;
}

BetaOptions cheap_opt() {
    BetaOptions o;
    o.h = 1.0 / 48;
    o.spectrum_count = 24;
    o.use_cache = false;
    return o;
}

InclusionModel square_model() {
    InclusionModel m;
    m.kind = ModelKind::periodic_single;
    m.base_shape = square_shape(0.45);
    return m;
}

}  // namespace

TEST_CASE("sigma_A0: single shape yields isolated points") {
    BetaEvaluator eval(square_model(), scalar_phys(), cheap_opt());
    const double nu1 = eval.base_spectrum().values[0];
    const SpectralSet s = sigma_A0(eval, 5.0 * nu1);
    CHECK(s.intervals.empty());
    REQUIRE(!s.points.empty());
    CHECK(s.points[0] == doctest::Approx(nu1));
    CHECK(s.contains(nu1, 1e-9));
}

TEST_CASE("sigma_A0: scaling range becomes merged intervals") {
    InclusionModel m = square_model();
    m.kind = ModelKind::iid_scaling;
    m.scaling.continuous = true;
    m.scaling.r1 = 0.5;
    m.scaling.r2 = 0.9999;  // intervals [nu, 4 nu] essentially
    BetaEvaluator eval(m, scalar_phys(), cheap_opt());
    const double nu1 = eval.base_spectrum().values[0];
    const SpectralSet s = sigma_A0(eval, 20.0 * nu1);
    REQUIRE(!s.intervals.empty());
    CHECK(s.intervals[0].first == doctest::Approx(nu1).epsilon(1e-3));
    CHECK(s.intervals[0].second >= 4.0 * nu1 * 0.99);

    // A narrow scaling range with overlapping dilated bands merges: pick
    // r in [0.9, 1] so [nu_k, nu_k/0.81] chains can overlap for close nu's.
    InclusionModel m2 = square_model();
    m2.kind = ModelKind::iid_scaling;
    m2.scaling.continuous = true;
    m2.scaling.r1 = 0.7;
    m2.scaling.r2 = 0.99;
    BetaEvaluator eval2(m2, scalar_phys(), cheap_opt());
    const auto& vals = eval2.base_spectrum().values;
    // nu_2/nu_1 = 5/2 for the square; (1/0.7^2) ~ 2.04 < 2.5 so the first
    // two intervals stay disjoint, while the degenerate nu_2 = nu_3 pair
    // merges into one reported interval.
    const SpectralSet s2 = sigma_A0(eval2, 6.0 * vals[0]);
    for (std::size_t i = 1; i < s2.intervals.size(); ++i)
        CHECK(s2.intervals[i].first > s2.intervals[i - 1].second);
}

TEST_CASE("spectrum_hom reproduces the classical band structure (scalar)") {
    BetaEvaluator eval(square_model(), scalar_phys(), cheap_opt());
    const double nu1 = eval.base_spectrum().values[0];
    GridOptions grid;
    grid.lambda_max = 3.0 * nu1;
    grid.points = 200;
    const SpectralSet hom = spectrum_hom(eval, grid);

    // A band starts at 0 (beta = lambda + O(lambda^2) > 0 near 0+).
    REQUIRE(!hom.intervals.empty());
    CHECK(hom.intervals[0].first == doctest::Approx(0.0));
    // The first band closes at the first significant pole nu_1.
    CHECK(hom.intervals[0].second == doctest::Approx(nu1).epsilon(1e-6));

    // Just above nu_1 beta is negative: a gap, then the next band opens at
    // the root of beta. Verify the root by the independent expansion oracle.
    REQUIRE(hom.intervals.size() >= 2);
    const double root = hom.intervals[1].first;
    CHECK(root > nu1);
    const BetaMatrix just_above = eval.beta(root * 1.01);
    const BetaMatrix just_below = eval.beta(root * 0.99);
    CHECK(just_above.value(0, 0) > 0.0);
    CHECK(just_below.value(0, 0) < 0.0);
}

TEST_CASE("weak band: anisotropic rectangle has mixed-signature windows") {
    PhysicsSpec phys;
    phys.c0 = make_isotropic({1.0, 2.0}, 2);
    InclusionModel m;
    m.kind = ModelKind::periodic_single;
    m.base_shape = rectangle_shape(0.4, 0.2);
    BetaEvaluator eval(m, phys, cheap_opt());
    GridOptions grid;
    grid.lambda_max = 3.0 * eval.base_spectrum().values[0];
    grid.points = 250;
    const SpectralSet hom = spectrum_hom(eval, grid);
    bool weak = false, strong = false;
    for (int c : hom.band_count) {
        weak = weak || c == 1;
        strong = strong || c == 2;
    }
    CHECK(weak);
    CHECK(strong);
}

TEST_CASE("set inclusions: sigma_A0 within sigma_Ahom within G; G strictly larger for iid-rotation") {
    PhysicsSpec phys;
    phys.c0 = make_isotropic({1.0, 2.0}, 2);
    InclusionModel m;
    m.kind = ModelKind::iid_rotation;
    m.base_shape = rectangle_shape(0.4, 0.2);
    BetaEvaluator eval(m, phys, cheap_opt());
    GridOptions grid;
    grid.lambda_max = 2.0 * eval.base_spectrum().values[0];
    grid.points = 200;
    BetaInfinityOptions binf;
    binf.samples = 0;

    const SpectralSet micro = sigma_A0(eval, grid.lambda_max);
    const SpectralSet hom = spectrum_hom(eval, grid);
    const SpectralSet g = set_G(eval, grid, binf);
    const auto lams = make_lambda_grid(eval, grid);
    CHECK(subset_on_grid(micro, hom, lams, 1e-6 * grid.lambda_max));
    CHECK(subset_on_grid(hom, g, lams, 1e-6 * grid.lambda_max));

    // Ordering beta_max <= beta_inf on every valid gridpoint, and strict
    // containment of sigma_Ahom in G on some window.
    bool strictly_larger = false;
    const double guard = eval.pole_guard();
    for (double lam : lams) {
        if (lam <= 0.0 || eval.pole_distance(lam) <= guard) continue;
        const double bmax = eval.beta_max(lam);
        const double binf_val = beta_infinity(eval, lam, binf).closed_form;
        CHECK(bmax <= binf_val + 1e-9);
        if (g.contains(lam) && !hom.contains(lam, 1e-9)) strictly_larger = true;
    }
    CHECK(strictly_larger);
}

TEST_CASE("single-shape model: G equals sigma_Ahom on the grid") {
    BetaEvaluator eval(square_model(), scalar_phys(), cheap_opt());
    GridOptions grid;
    grid.lambda_max = 3.0 * eval.base_spectrum().values[0];
    grid.points = 150;
    BetaInfinityOptions binf;
    binf.samples = 0;
    const SpectralSet hom = spectrum_hom(eval, grid);
    const SpectralSet g = set_G(eval, grid, binf);
    REQUIRE(hom.intervals.size() == g.intervals.size());
    for (std::size_t i = 0; i < hom.intervals.size(); ++i) {
        CHECK(hom.intervals[i].first == doctest::Approx(g.intervals[i].first).epsilon(1e-9));
        CHECK(hom.intervals[i].second == doctest::Approx(g.intervals[i].second).epsilon(1e-9));
    }
}

TEST_CASE("dispersion: closed forms and gap behavior") {
    // A = diag(4, 1), beta = I -> roots r n {1/2, 1} with axis polarizations.
    ElasticityTensor chom(2);
    chom.set(0, 0, 0, 0, 4.0);
    chom.set(1, 0, 1, 0, 1.0);
    // (k.C.k) with k = e1: A_ab = C_{a 0 0 b}: A11 = C_0000 = 4, A22 = C_1001 = 1.
    BetaMatrix beta;
    beta.lambda = 1.0;
    beta.value = Eigen::MatrixXd::Identity(2, 2);
    const DispersionSolution sol = dispersion(1.0, Eigen::Vector2d(1, 0), chom, beta);
    REQUIRE(sol.roots.size() == 2);
    CHECK(sol.roots[0].first == doctest::Approx(0.5));
    CHECK(sol.roots[1].first == doctest::Approx(1.0));
    CHECK(std::abs(sol.roots[0].second.x()) == doctest::Approx(1.0));
    CHECK(std::abs(sol.roots[1].second.y()) == doctest::Approx(1.0));

    // Negative definite beta: no propagating roots.
    beta.value = -Eigen::MatrixXd::Identity(2, 2);
    CHECK(dispersion(1.0, Eigen::Vector2d(1, 0), chom, beta).roots.empty());

    // Isotropic Chom with scalar beta = b I: roots sqrt(b / eig(A)).
    const ElasticityTensor iso = make_isotropic({1.0, 2.0}, 2);
    beta.value = 3.0 * Eigen::MatrixXd::Identity(2, 2);
    const Eigen::Vector2d k = Eigen::Vector2d(1, 1).normalized();
    const DispersionSolution iso_sol = dispersion(1.0, k, iso, beta);
    const Eigen::Matrix2d a = acoustic_matrix(iso, k);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(a);
    REQUIRE(iso_sol.roots.size() == 2);
    CHECK(iso_sol.roots[0].first == doctest::Approx(std::sqrt(3.0 / es.eigenvalues()(1))));
    CHECK(iso_sol.roots[1].first == doctest::Approx(std::sqrt(3.0 / es.eigenvalues()(0))));

    // Residual invariant: ||(r^2 A - beta) c|| small.
    for (const auto& [r, c] : iso_sol.roots)
        CHECK(((r * r * a - beta.value) * c).norm() <= 1e-8);
}
