#include "hclab/beta.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace hc {

namespace {

// 16-point Gauss-Legendre nodes/weights on [-1, 1].
const double kGL16x[] = {-0.9894009349916499, -0.9445750230732326, -0.8656312023878318,
                         -0.7554044083550030, -0.6178762444026438, -0.4580167776572274,
                         -0.2816035507792589, -0.0950125098376374, 0.0950125098376374,
                         0.2816035507792589,  0.4580167776572274,  0.6178762444026438,
                         0.7554044083550030,  0.8656312023878318,  0.9445750230732326,
                         0.9894009349916499};
const double kGL16w[] = {0.0271524594117541, 0.0622535239386479, 0.0951585116824928,
                         0.1246289712555339, 0.1495959888165767, 0.1691565193950025,
                         0.1826034150449236, 0.1894506104550685, 0.1894506104550685,
                         0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
                         0.1246289712555339, 0.0951585116824928, 0.0622535239386479,
                         0.0271524594117541};
const double kGL32x[] = {
    -0.9972638618494816, -0.9856115115452684, -0.9647622555875064, -0.9349060759377397,
    -0.8963211557660521, -0.8493676137325700, -0.7944837959679424, -0.7321821187402897,
    -0.6630442669302152, -0.5877157572407623, -0.5068999089322294, -0.4213512761306353,
    -0.3318686022821277, -0.2392873622521371, -0.1444719615827965, -0.0483076656877383,
    0.0483076656877383,  0.1444719615827965,  0.2392873622521371,  0.3318686022821277,
    0.4213512761306353,  0.5068999089322294,  0.5877157572407623,  0.6630442669302152,
    0.7321821187402897,  0.7944837959679424,  0.8493676137325700,  0.8963211557660521,
    0.9349060759377397,  0.9647622555875064,  0.9856115115452684,  0.9972638618494816};
const double kGL32w[] = {
    0.0070186100094701, 0.0162743947309057, 0.0253920653092621, 0.0342738629130214,
    0.0428358980222267, 0.0509980592623762, 0.0586840934785355, 0.0658222227763618,
    0.0723457941088485, 0.0781938957870703, 0.0833119242269467, 0.0876520930044038,
    0.0911738786957639, 0.0938443990808046, 0.0956387200792749, 0.0965400885147278,
    0.0965400885147278, 0.0956387200792749, 0.0938443990808046, 0.0911738786957639,
    0.0876520930044038, 0.0833119242269467, 0.0781938957870703, 0.0723457941088485,
    0.0658222227763618, 0.0586840934785355, 0.0509980592623762, 0.0428358980222267,
    0.0342738629130214, 0.0253920653092621, 0.0162743947309057, 0.0070186100094701};

}  // namespace

std::vector<CellAtom> model_atoms(const InclusionModel& model, int quad_nodes) {
    std::vector<CellAtom> atoms;
    switch (model.kind) {
        case ModelKind::periodic_single: atoms.push_back({0, 1.0, 1.0}); break;
        case ModelKind::periodic_triple_rotation:
            atoms.push_back({0, 1.0, 0.5});
            atoms.push_back({1, 1.0, 0.5});
            break;
        case ModelKind::iid_rotation: {
            std::vector<double> w = model.probabilities;
            if (w.empty()) w = {0.5, 0.5};
            for (std::size_t k = 0; k < w.size(); ++k)
                if (w[k] > 0.0) atoms.push_back({static_cast<int>(k), 1.0, w[k]});
            break;
        }
        case ModelKind::iid_scaling: {
            if (model.scaling.continuous) {
                const double r1 = model.scaling.r1, r2 = model.scaling.r2;
                const double* x = quad_nodes == 32 ? kGL32x : kGL16x;
                const double* w = quad_nodes == 32 ? kGL32w : kGL16w;
                const int n = quad_nodes == 32 ? 32 : 16;
                for (int k = 0; k < n; ++k)
                    atoms.push_back({0, 0.5 * (r1 + r2) + 0.5 * (r2 - r1) * x[k], 0.5 * w[k]});
            } else {
                for (auto [r, w] : model.scaling.atoms) atoms.push_back({0, r, w});
            }
            break;
        }
    }
    return atoms;
}

bool tensor_commutes(const ElasticityTensor& c, const Eigen::Matrix2d& g) {
    const auto basis = symmetric_basis(2);
    for (const auto& xi : basis) {
        const Eigen::MatrixXd lhs = c.apply(g * xi * g.transpose());
        const Eigen::MatrixXd rhs = g * c.apply(xi) * g.transpose();
        if ((lhs - rhs).norm() > 1e-12 * (rhs.norm() + 1.0)) return false;
    }
    return true;
}

BetaEvaluator::BetaEvaluator(InclusionModel model, PhysicsSpec phys, BetaOptions opt)
    : model_(std::move(model)), phys_(std::move(phys)), opt_(opt) {
    model_.validate();
    atoms_ = model_atoms(model_, opt_.quad_nodes);
    if (!phys_.scalar) {
        const Eigen::Matrix2d rot = SymmetryOp{SymmetryOp::Kind::rotate_quarter, 1}.matrix();
        covariant_ = tensor_commutes(phys_.c0, rot);
    }
}

const BetaEvaluator::PerScale& BetaEvaluator::per_scale(double r) const {
    const long long key = std::llround(r * 1e12);
    auto it = scales_.find(key);
    if (it != scales_.end()) return it->second;

    InclusionShape scaled = model_.base_shape;
    for (auto& v : scaled.boundary) v *= r;
    scaled.id = model_.base_shape.id + "@" + std::to_string(r);

    PerScale ps;
    SpectrumOptions sopt;
    sopt.h = opt_.h * r;
    sopt.count = opt_.spectrum_count;
    sopt.scalar = phys_.scalar;
    sopt.scalar_coefficient = phys_.scalar_coefficient;
    sopt.use_cache = opt_.use_cache;
    ps.dec = dirichlet_spectrum(scaled, phys_.c0, sopt);

    const Mesh mesh = build_shape_mesh(scaled, sopt.h);
    ps.forms = std::make_shared<AssembledForms>(
        phys_.scalar ? assemble_scalar(mesh, phys_.scalar_coefficient, BcKind::dirichlet)
                     : assemble_elasticity(mesh, phys_.c0, BcKind::dirichlet));
    ps.b0 = solve_b_lambda_on(*ps.forms, 0.0, ps.dec.values[0]).B;
    return scales_.emplace(key, std::move(ps)).first->second;
}

Eigen::MatrixXd BetaEvaluator::rotate(const Eigen::MatrixXd& b, int rotation) const {
    if (phys_.scalar || rotation % 4 == 0) return b;
    const Eigen::Matrix2d g = SymmetryOp{SymmetryOp::Kind::rotate_quarter, rotation}.matrix();
    return g * b * g.transpose();
}

Eigen::MatrixXd BetaEvaluator::atom_response(const CellAtom& atom, double lambda) const {
    const PerScale& ps = per_scale(atom.scale);
    if (lambda == 0.0) return rotate(ps.b0, atom.rotation);
    if (covariant_ || phys_.scalar || atom.rotation % 4 == 0) {
        const ResolventSample s = solve_b_lambda_on(*ps.forms, lambda, pole_distance(lambda));
        // Symmetrized before group averaging so statistical symmetries
        // cancel the off-diagonal exactly.
        const Eigen::MatrixXd bs = 0.5 * (s.B + s.B.transpose());
        return rotate(bs, atom.rotation);
    }
    // Non-covariant coefficient: solve on the transformed shape directly.
    InclusionShape shape = model_.base_shape;
    for (auto& v : shape.boundary) v *= atom.scale;
    shape = apply_symmetry(shape, SymmetryOp{SymmetryOp::Kind::rotate_quarter, atom.rotation});
    shape.id = model_.base_shape.id + "@rot" + std::to_string(atom.rotation) + "@" +
               std::to_string(atom.scale);
    ResolventOptions ropt;
    ropt.h = opt_.h * atom.scale;
    ropt.scalar = phys_.scalar;
    ropt.scalar_coefficient = phys_.scalar_coefficient;
    ropt.pole_guard_rel = opt_.pole_guard_rel;
    ropt.spectrum_count = opt_.spectrum_count;
    ropt.use_cache = opt_.use_cache;
    return solve_b_lambda(shape, phys_.c0, lambda, ropt).B;
}

Eigen::MatrixXd BetaEvaluator::atom_beta(const CellAtom& atom, double lambda) const {
    const int d = phys_.block();
    return lambda * Eigen::MatrixXd::Identity(d, d) +
           lambda * lambda * atom_response(atom, lambda);
}

Eigen::MatrixXd BetaEvaluator::response_by_dilation(double r, double lambda) const {
    const PerScale& base = per_scale(1.0);
    const int d = 2;  // spatial dimension of the lattice
    const double rd = std::pow(r, d);
    Eigen::MatrixXd out = std::pow(r, d + 2) * base.b0;
    for (int n = 0; n < base.dec.values.size(); ++n) {
        const double s = base.dec.values[n] / (r * r);
        const Eigen::VectorXd m = base.dec.moments.row(n);
        out += lambda * rd / (s * (s - lambda)) * (m * m.transpose());
    }
    return out;
}

double BetaEvaluator::pole_distance(double lambda) const {
    double dist = std::numeric_limits<double>::infinity();
    const EigenDecomposition& base = per_scale(1.0).dec;
    auto scan = [&](double r) {
        for (int n = 0; n < base.values.size(); ++n)
            dist = std::min(dist, std::abs(base.values[n] / (r * r) - lambda));
    };
    if (model_.kind == ModelKind::iid_scaling) {
        if (model_.scaling.continuous) {
            // The scaled spectrum sweeps intervals [nu/r2^2, nu/r1^2].
            for (int n = 0; n < base.values.size(); ++n) {
                const double lo = base.values[n] / (model_.scaling.r2 * model_.scaling.r2);
                const double hi = base.values[n] / (model_.scaling.r1 * model_.scaling.r1);
                if (lambda >= lo && lambda <= hi) dist = 0.0;
                else dist = std::min(dist, std::min(std::abs(lambda - lo), std::abs(lambda - hi)));
            }
        } else {
            for (auto [r, w] : model_.scaling.atoms) scan(r);
        }
    } else {
        scan(1.0);
    }
    return dist;
}

double BetaEvaluator::pole_guard() const {
    double nu1 = per_scale(1.0).dec.values[0];
    if (model_.kind == ModelKind::iid_scaling) {
        // Smallest micro-resonance across the support.
        double rmax = model_.scaling.continuous ? model_.scaling.r2 : 0.0;
        if (!model_.scaling.continuous)
            for (auto [r, w] : model_.scaling.atoms) rmax = std::max(rmax, r);
        nu1 /= rmax * rmax;
    }
    return opt_.pole_guard_rel * nu1;
}

const EigenDecomposition& BetaEvaluator::base_spectrum() const { return per_scale(1.0).dec; }

std::vector<double> BetaEvaluator::significant_poles(double lambda_max) const {
    const PerScale& ps = per_scale(1.0);
    std::vector<double> poles;
    const double cell_volume = 1.0;
    for (int n = 0; n < ps.dec.values.size(); ++n) {
        if (ps.dec.values[n] > lambda_max) break;
        if (ps.dec.moments.row(n).norm() > 1e-6 * std::sqrt(cell_volume))
            poles.push_back(ps.dec.values[n]);
    }
    // Merge numerically coincident (multiple) eigenvalues.
    std::vector<double> merged;
    for (double p : poles)
        if (merged.empty() || p - merged.back() > 1e-9 * std::max(1.0, p)) merged.push_back(p);
    return merged;
}

BetaMatrix BetaEvaluator::beta(double lambda) const {
    const int d = phys_.block();
    BetaMatrix out;
    out.lambda = lambda;
    out.value = Eigen::MatrixXd::Zero(d, d);
    if (lambda == 0.0) return out;  // beta(0) = 0 exactly

    if (pole_distance(lambda) <= pole_guard()) {
        out.pole_flag = true;
        return out;
    }
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(d, d);
    std::ostringstream prov;
    for (const CellAtom& atom : atoms_) {
        acc += atom.weight * atom_response(atom, lambda);
        prov << "(r=" << atom.scale << ",rot=" << atom.rotation << ",w=" << atom.weight << ")";
    }
    out.value = lambda * Eigen::MatrixXd::Identity(d, d) + lambda * lambda * acc;
    out.provenance = prov.str();
    return out;
}

double BetaEvaluator::beta_max(double lambda) const {
    const BetaMatrix b = beta(lambda);
    if (b.pole_flag) throw std::runtime_error("beta_max: lambda inside pole guard");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b.value);
    return es.eigenvalues().maxCoeff();
}

BetaRResult beta_r(const InclusionShape& base, const PhysicsSpec& phys, double r, double lambda,
                   const BetaOptions& opt) {
    if (!(r > 0.0 && r <= 1.0)) throw std::invalid_argument("beta_r: r in (0, 1] required");
    InclusionModel single;
    single.kind = ModelKind::periodic_single;
    single.base_shape = base;
    BetaEvaluator eval(single, phys, opt);

    const int d = phys.block();
    BetaRResult out;
    out.lambda = lambda;
    out.scale = r;

    const CellAtom atom{0, r, 1.0};
    out.direct = lambda * Eigen::MatrixXd::Identity(d, d) +
                 lambda * lambda * eval.atom_response(atom, lambda);
    out.expansion = lambda * Eigen::MatrixXd::Identity(d, d) +
                    lambda * lambda * eval.response_by_dilation(r, lambda);

    // Literal r^{-6}-prefactor variant of the scaled expansion, kept for the
    // documented comparison against the direct solve.
    const EigenDecomposition& dec = eval.base_spectrum();
    Eigen::MatrixXd lit = Eigen::MatrixXd::Zero(d, d);
    for (int n = 0; n < dec.values.size(); ++n) {
        const double s = dec.values[n] / (r * r);
        const Eigen::VectorXd m = dec.moments.row(n);
        lit += std::pow(r, -6) / (s - lambda) * (m * m.transpose());
    }
    out.literal = lambda * Eigen::MatrixXd::Identity(d, d) + lambda * lambda * lit;

    const double scale = out.direct.norm() + 1e-30;
    out.expansion_discrepancy = (out.direct - out.expansion).norm() / scale;
    out.literal_discrepancy = (out.direct - out.literal).norm() / scale;
    return out;
}

namespace {

double largest_eigenvalue(const Eigen::MatrixXd& m) {
    if (m.rows() == 1) return m(0, 0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    return es.eigenvalues().maxCoeff();
}

}  // namespace

BetaInfinityResult beta_infinity(const BetaEvaluator& eval, double lambda,
                                 const BetaInfinityOptions& opt) {
    if (opt.samples < 0) throw std::invalid_argument("beta_infinity: samples >= 0 required");
    if (opt.window_cells < 1) throw std::invalid_argument("beta_infinity: L >= 1 required");
    const InclusionModel& model = eval.model();
    const int d = eval.physics().block();
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(d, d);

    BetaInfinityResult out;
    out.lambda = lambda;

    // Per-cell response evaluator, shared verbatim by the estimator and the
    // closed form so the max-over-mixtures <= max-over-atoms dominance is
    // exact.
    const bool continuous = model.kind == ModelKind::iid_scaling && model.scaling.continuous;
    std::map<std::pair<int, long long>, Eigen::MatrixXd> atom_b;
    auto response = [&](const Placement& pl) -> Eigen::MatrixXd {
        if (continuous) return eval.response_by_dilation(pl.scale, lambda);
        const std::pair<int, long long> key{pl.rotation, std::llround(pl.scale * 1e12)};
        auto it = atom_b.find(key);
        if (it != atom_b.end()) return it->second;
        const Eigen::MatrixXd b = eval.atom_response({pl.rotation, pl.scale, 1.0}, lambda);
        return atom_b.emplace(key, b).first->second;
    };

    const int L = opt.window_cells;
    const int W = 2 * L;  // sampled window side; sub-cubes slide with stride 1
    double best = -std::numeric_limits<double>::infinity();
    double best_single_cell = -std::numeric_limits<double>::infinity();
    for (int s = 0; s < opt.samples; ++s) {
        const Configuration cfg =
            generate_configuration(model, W, opt.seed + static_cast<std::uint64_t>(s));
        std::vector<Eigen::MatrixXd> cell(static_cast<std::size_t>(W) * W, Eigen::MatrixXd::Zero(d, d));
        for (const auto& pl : cfg.placements) {
            const Eigen::MatrixXd b = response(pl);
            cell[static_cast<std::size_t>(pl.cell_y) * W + pl.cell_x] = b;
            best_single_cell =
                std::max(best_single_cell, largest_eigenvalue(lambda * id + lambda * lambda * b));
        }
        // 2D prefix sums over cells.
        std::vector<Eigen::MatrixXd> prefix(static_cast<std::size_t>(W + 1) * (W + 1),
                                            Eigen::MatrixXd::Zero(d, d));
        for (int y = 0; y < W; ++y)
            for (int x = 0; x < W; ++x)
                prefix[(y + 1) * (W + 1) + (x + 1)] = cell[y * W + x] +
                                                      prefix[y * (W + 1) + (x + 1)] +
                                                      prefix[(y + 1) * (W + 1) + x] -
                                                      prefix[y * (W + 1) + x];
        for (int oy = 0; oy + L <= W; ++oy)
            for (int ox = 0; ox + L <= W; ++ox) {
                const Eigen::MatrixXd sum = prefix[(oy + L) * (W + 1) + (ox + L)] -
                                            prefix[oy * (W + 1) + (ox + L)] -
                                            prefix[(oy + L) * (W + 1) + ox] +
                                            prefix[oy * (W + 1) + ox];
                const Eigen::MatrixXd avg = sum / static_cast<double>(L * L);
                best = std::max(best, largest_eigenvalue(lambda * id + lambda * lambda * avg));
            }
        out.running_max.push_back(best);
    }
    out.estimate = best;

    // Closed form.
    out.has_closed_form = true;
    switch (model.kind) {
        case ModelKind::periodic_single:
        case ModelKind::periodic_triple_rotation: {
            Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(d, d);
            for (const CellAtom& atom : eval.atoms()) {
                Eigen::MatrixXd b = continuous ? eval.response_by_dilation(atom.scale, lambda)
                                               : response(Placement{0, 0, atom.rotation, false, atom.scale});
                acc += atom.weight * b;
            }
            out.closed_form = largest_eigenvalue(lambda * id + lambda * lambda * acc);
            break;
        }
        case ModelKind::iid_rotation: {
            double best_atom = -std::numeric_limits<double>::infinity();
            for (const CellAtom& atom : eval.atoms()) {
                const Eigen::MatrixXd b = response(Placement{0, 0, atom.rotation, false, atom.scale});
                best_atom = std::max(best_atom,
                                     largest_eigenvalue(lambda * id + lambda * lambda * b));
            }
            out.closed_form = best_atom;
            break;
        }
        case ModelKind::iid_scaling: {
            if (!model.scaling.continuous) {
                double best_atom = -std::numeric_limits<double>::infinity();
                for (auto [r, w] : model.scaling.atoms) {
                    const Eigen::MatrixXd b = response(Placement{0, 0, 0, false, r});
                    best_atom = std::max(best_atom,
                                         largest_eigenvalue(lambda * id + lambda * lambda * b));
                }
                out.closed_form = best_atom;
            } else {
                // Coarse scan plus golden-section polish over the support.
                auto f = [&](double r) {
                    return largest_eigenvalue(lambda * id +
                                              lambda * lambda * eval.response_by_dilation(r, lambda));
                };
                const double r1 = model.scaling.r1, r2 = model.scaling.r2;
                const int scan = 64;
                double best_r = r1, best_v = -std::numeric_limits<double>::infinity();
                for (int k = 0; k <= scan; ++k) {
                    const double r = r1 + (r2 - r1) * k / scan;
                    const double v = f(r);
                    if (v > best_v) {
                        best_v = v;
                        best_r = r;
                    }
                }
                double lo = std::max(r1, best_r - (r2 - r1) / scan);
                double hi = std::min(r2, best_r + (r2 - r1) / scan);
                const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
                double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
                double f1 = f(x1), f2 = f(x2);
                for (int it = 0; it < 60; ++it) {
                    if (f1 < f2) {
                        lo = x1;
                        x1 = x2;
                        f1 = f2;
                        x2 = lo + phi * (hi - lo);
                        f2 = f(x2);
                    } else {
                        hi = x2;
                        x2 = x1;
                        f2 = f1;
                        x1 = hi - phi * (hi - lo);
                        f1 = f(x1);
                    }
                }
                out.closed_form = std::max(best_v, std::max(f1, f2));
                // Every scale observed in the Monte Carlo belongs to the
                // support, so it sharpens the sup and keeps the estimator
                // dominated by the closed form.
                out.closed_form = std::max(out.closed_form, best_single_cell);
            }
            break;
        }
    }
    return out;
}

}  // namespace hc
