#include "hclab/beta.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>

using namespace hc;

namespace {

InclusionModel rect_model(ModelKind kind) {
    InclusionModel m;
    m.kind = kind;
    m.base_shape = rectangle_shape(0.4, 0.2);
    return m;
}

PhysicsSpec elasticity_phys() {
    PhysicsSpec p;
    p.c0 = make_isotropic({1.0, 2.0}, 2);
    return p;
}

BetaOptions cheap_opt() {
    BetaOptions o;
    o.h = 1.0 / 48;
    o.spectrum_count = 24;
    o.use_cache = false;
    return o;
}

double lam_max_of(const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    return es.eigenvalues().maxCoeff();
}

}  // namespace

TEST_CASE("beta(0) is the zero matrix exactly") {
    BetaEvaluator eval(rect_model(ModelKind::periodic_single), elasticity_phys(), cheap_opt());
    const BetaMatrix b = eval.beta(0.0);
    CHECK(b.value.norm() == 0.0);
    CHECK_FALSE(b.pole_flag);
}

TEST_CASE("single-shape beta matches the eigen-expansion oracle to 1e-3") {
    BetaEvaluator eval(rect_model(ModelKind::periodic_single), elasticity_phys(), cheap_opt());
    const EigenDecomposition& dec = eval.base_spectrum();
    const double nu1 = dec.values[0];

    // Oracle: beta = lambda I + lambda^2 [B(0) + lambda-folded truncated sum].
    const Eigen::MatrixXd b0 = eval.atom_response({0, 1.0, 1.0}, 0.0);
    for (double lam : {0.25 * nu1, 0.5 * nu1, 0.8 * nu1}) {
        const BetaMatrix b = eval.beta(lam);
        REQUIRE_FALSE(b.pole_flag);
        CHECK((b.value - b.value.transpose()).norm() <= 1e-9 * b.value.norm());
        Eigen::MatrixXd expansion = b0;
        for (int n = 0; n < dec.values.size(); ++n) {
            const Eigen::VectorXd m = dec.moments.row(n);
            expansion += lam / (dec.values[n] * (dec.values[n] - lam)) * (m * m.transpose());
        }
        const Eigen::MatrixXd oracle =
            lam * Eigen::MatrixXd::Identity(2, 2) + lam * lam * expansion;
        CHECK((b.value - oracle).norm() <= 1e-3 * (oracle.norm() + 1.0));
    }
}

TEST_CASE("two-atom scaling model is the exact mixture of per-atom betas") {
    InclusionModel m = rect_model(ModelKind::iid_scaling);
    m.scaling.atoms = {{0.4, 0.5}, {0.5, 0.5}};
    BetaEvaluator eval(m, elasticity_phys(), cheap_opt());
    const double lam = 0.3 * eval.base_spectrum().values[0] / (0.5 * 0.5);
    const BetaMatrix b = eval.beta(lam);
    REQUIRE_FALSE(b.pole_flag);
    const Eigen::MatrixXd b4 = eval.atom_beta({0, 0.4, 1.0}, lam);
    const Eigen::MatrixXd b5 = eval.atom_beta({0, 0.5, 1.0}, lam);
    CHECK((b.value - 0.5 * (b4 + b5)).norm() <= 1e-12 * b.value.norm());
}

TEST_CASE("reflection-symmetric rectangle: beta is diagonal to 1e-6") {
    BetaEvaluator eval(rect_model(ModelKind::periodic_single), elasticity_phys(), cheap_opt());
    const double nu1 = eval.base_spectrum().values[0];
    for (int i = 1; i <= 20; ++i) {
        const double lam = 0.9 * nu1 * i / 20.0;
        const BetaMatrix b = eval.beta(lam);
        if (b.pole_flag) continue;
        CHECK(std::abs(b.value(0, 1)) <= 1e-6 * b.value.norm());
    }
}

TEST_CASE("rotation-symmetrized model: beta is scalar and equals (tr beta_per^Q / 2) I") {
    const auto phys = elasticity_phys();
    BetaEvaluator eval(rect_model(ModelKind::iid_rotation), phys, cheap_opt());
    BetaEvaluator eval_per(rect_model(ModelKind::periodic_single), phys, cheap_opt());
    const double nu1 = eval.base_spectrum().values[0];
    for (double frac : {0.2, 0.5, 0.85}) {
        const double lam = frac * nu1;
        const BetaMatrix b = eval.beta(lam);
        REQUIRE_FALSE(b.pole_flag);
        const Eigen::MatrixXd dev =
            b.value - 0.5 * b.value.trace() * Eigen::MatrixXd::Identity(2, 2);
        CHECK(dev.norm() <= 1e-6 * b.value.norm());

        const BetaMatrix bq = eval_per.beta(lam);
        CHECK(b.value(0, 0) == doctest::Approx(0.5 * bq.value.trace()).epsilon(1e-9));
    }
    // The deterministic checkerboard gives the same expectation.
    BetaEvaluator eval_chk(rect_model(ModelKind::periodic_triple_rotation), phys, cheap_opt());
    const double lam = 0.5 * nu1;
    CHECK((eval_chk.beta(lam).value - eval.beta(lam).value).norm() <= 1e-12);
}

TEST_CASE("beta_r: r=1 equals the single-shape beta; dual routes agree at r=0.5") {
    const auto phys = elasticity_phys();
    const InclusionShape rect = rectangle_shape(0.4, 0.2);
    BetaEvaluator eval(rect_model(ModelKind::periodic_single), phys, cheap_opt());
    const double nu1 = eval.base_spectrum().values[0];

    const BetaRResult r1 = beta_r(rect, phys, 1.0, 0.5 * nu1, cheap_opt());
    CHECK((r1.direct - eval.beta(0.5 * nu1).value).norm() <= 1e-12 * r1.direct.norm());

    // Scaled shape: poles at r^-2 nu_n; dilation route vs direct solve.
    const double r = 0.5;
    const double lam = 0.3 * nu1 / (r * r);
    const BetaRResult res = beta_r(rect, phys, r, lam, cheap_opt());
    CHECK(res.expansion_discrepancy <= 1e-3);
    // The r^-6-prefactor variant does not match the direct solve in d=2;
    // the discrepancy is reported, not silently resolved.
    CHECK(res.literal_discrepancy > 10.0 * res.expansion_discrepancy);
}

TEST_CASE("poles of the scaled problem sit at r^-2 nu_n") {
    const auto phys = elasticity_phys();
    BetaOptions opt = cheap_opt();
    InclusionModel m = rect_model(ModelKind::iid_scaling);
    m.scaling.atoms = {{0.5, 1.0}};
    BetaEvaluator eval(m, phys, opt);
    const double nu1 = eval.base_spectrum().values[0];
    const double pole = nu1 / 0.25;
    // Sign drop of the largest eigenvalue across the significant pole.
    const double guard = eval.pole_guard();
    const Eigen::MatrixXd below = eval.beta(pole - 4 * guard).value;
    const Eigen::MatrixXd above = eval.beta(pole + 4 * guard).value;
    CHECK(lam_max_of(below) > 0.0);
    CHECK(lam_max_of(below) > lam_max_of(above) + 1.0);
    // Inside the guard the evaluation is withheld.
    CHECK(eval.beta(pole).pole_flag);
}

TEST_CASE("fixed-direction monotonicity between significant poles") {
    PhysicsSpec phys;
    phys.scalar = true;
    BetaOptions opt = cheap_opt();
    InclusionModel m;
    m.kind = ModelKind::periodic_single;
    m.base_shape = square_shape(0.45);
    BetaEvaluator eval(m, phys, opt);
    const auto poles = eval.significant_poles(12.0 * eval.base_spectrum().values[0]);
    REQUIRE(poles.size() >= 2);
    double prev = -1e300;
    for (int i = 1; i <= 30; ++i) {
        const double lam = poles[0] * i / 31.0;
        const BetaMatrix b = eval.beta(lam);
        if (b.pole_flag) continue;
        CHECK(b.value(0, 0) > prev);
        prev = b.value(0, 0);
    }
    prev = -1e300;
    for (int i = 1; i <= 30; ++i) {
        const double lam = poles[0] + (poles[1] - poles[0]) * i / 31.0;
        const BetaMatrix b = eval.beta(lam);
        if (b.pole_flag) continue;
        CHECK(b.value(0, 0) > prev);
        prev = b.value(0, 0);
    }
}

TEST_CASE("beta-infinity: discrete models, dominance and monotone running max") {
    const auto phys = elasticity_phys();
    InclusionModel m = rect_model(ModelKind::iid_scaling);
    m.scaling.atoms = {{0.4, 0.5}, {0.5, 0.5}};
    BetaEvaluator eval(m, phys, cheap_opt());
    const double lam = 0.3 * eval.base_spectrum().values[0] / 0.25;

    BetaInfinityOptions bopt;
    bopt.window_cells = 4;
    bopt.samples = 16;
    const BetaInfinityResult r = beta_infinity(eval, lam, bopt);
    REQUIRE(r.has_closed_form);
    // Closed form = max over the two per-atom largest eigenvalues.
    const double expect = std::max(lam_max_of(eval.atom_beta({0, 0.4, 1.0}, lam)),
                                   lam_max_of(eval.atom_beta({0, 0.5, 1.0}, lam)));
    CHECK(r.closed_form == doctest::Approx(expect).epsilon(1e-12));
    CHECK(r.estimate <= r.closed_form + 1e-9);
    for (std::size_t i = 1; i < r.running_max.size(); ++i)
        CHECK(r.running_max[i] >= r.running_max[i - 1]);
}

TEST_CASE("beta-infinity of the iid-rotation model is the max diagonal of beta_per^Q") {
    const auto phys = elasticity_phys();
    BetaEvaluator eval(rect_model(ModelKind::iid_rotation), phys, cheap_opt());
    BetaEvaluator eval_per(rect_model(ModelKind::periodic_single), phys, cheap_opt());
    const double lam = 0.5 * eval.base_spectrum().values[0];

    BetaInfinityOptions bopt;
    bopt.samples = 0;  // closed form only
    const BetaInfinityResult r = beta_infinity(eval, lam, bopt);
    const Eigen::MatrixXd bq = eval_per.beta(lam).value;
    CHECK(r.closed_form ==
          doctest::Approx(std::max(bq(0, 0), bq(1, 1))).epsilon(1e-9));
}

TEST_CASE("beta-infinity of the checkerboard equals the largest eigenvalue of beta") {
    const auto phys = elasticity_phys();
    BetaEvaluator eval(rect_model(ModelKind::periodic_triple_rotation), phys, cheap_opt());
    const double lam = 0.5 * eval.base_spectrum().values[0];
    BetaInfinityOptions bopt;
    bopt.window_cells = 4;
    bopt.samples = 2;
    const BetaInfinityResult r = beta_infinity(eval, lam, bopt);
    CHECK(r.closed_form == doctest::Approx(lam_max_of(eval.beta(lam).value)).epsilon(1e-12));
    CHECK(r.estimate == doctest::Approx(r.closed_form).epsilon(1e-12));
}
