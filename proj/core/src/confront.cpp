#include "hclab/confront.hpp"

#include "hclab/dispersion.hpp"

#include <Eigen/SparseCholesky>

#include <cmath>
#include <map>
#include <stdexcept>

namespace hc {

namespace {

AssembledForms two_phase_forms(const Mesh& mesh, const ElasticityTensor& c0,
                               const ElasticityTensor& c1, double epsilon) {
    Coefficient matrix_c, inclusion_c;
    matrix_c.tensor = c1;
    inclusion_c.tensor = c0;
    inclusion_c.factor = epsilon * epsilon;
    return assemble_forms(mesh, Physics::elasticity, {matrix_c, inclusion_c}, BcKind::periodic);
}

}  // namespace

EpsilonSpectrumReport epsilon_spectrum(const InclusionModel& model, const ElasticityTensor& c0,
                                       const ElasticityTensor& c1,
                                       const EpsilonSpectrumOptions& opt,
                                       const SpectralSet* reference) {
    if (opt.n_cells / opt.h_cell > opt.dof_budget)
        throw std::invalid_argument("epsilon_spectrum: n_cells/h_cell exceeds the dof budget");
    const double eps = 1.0 / opt.n_cells;

    const Configuration cfg = generate_configuration(model, opt.n_cells, opt.seed);
    Mesh mesh = build_two_phase_mesh(cfg, opt.h_cell);
    mesh.scale_nodes(eps);  // window [0, n]^2 -> unit torus

    const AssembledForms forms = two_phase_forms(mesh, c0, c1, eps);

    // The torus operator has the d-dimensional translation kernel; a small
    // negative shift keeps the factorization definite.
    const double shift = -1e-3;
    EigenDecomposition dec = solve_eigs(forms, opt.count, shift);

    EpsilonSpectrumReport rep;
    rep.epsilon = eps;
    rep.h_cell = opt.h_cell;
    // Clamp the numerically-zero translation modes to exactly zero.
    rep.eigenvalues = dec.values;
    for (int i = 0; i < dec.values.size(); ++i)
        if (std::abs(dec.values[i]) < 1e-9) rep.eigenvalues[i] = 0.0;

    if (reference) {
        for (int i = 0; i < rep.eigenvalues.size(); ++i)
            rep.distances.push_back(reference->distance(rep.eigenvalues[i]));
        for (const auto& [glo, ghi] : reference->gaps(rep.eigenvalues[rep.eigenvalues.size() - 1])) {
            for (int i = 0; i < rep.eigenvalues.size(); ++i) {
                const double lam = rep.eigenvalues[i];
                if (lam > glo && lam < ghi)
                    rep.gap_violations.push_back(std::min(lam - glo, ghi - lam));
            }
        }
    }

    // Two-phase energy split for the first mode above the kernel.
    int mode = 0;
    while (mode < dec.values.size() && dec.values[mode] < 1e-9) ++mode;
    if (mode < dec.values.size() && dec.has_vectors()) {
        Coefficient cm, ci_zero, ci, cm_zero;
        cm.tensor = c1;
        ci_zero.tensor = c1;
        ci_zero.factor = 0.0;
        ci.tensor = c0;
        ci.factor = eps * eps;
        cm_zero.tensor = c0;
        cm_zero.factor = 0.0;
        const AssembledForms matrix_only =
            assemble_forms(mesh, Physics::elasticity, {cm, ci_zero}, BcKind::periodic);
        const AssembledForms inclusion_only =
            assemble_forms(mesh, Physics::elasticity, {cm_zero, ci}, BcKind::periodic);
        const Eigen::VectorXd phi = dec.vectors.col(mode);
        rep.energy_matrix = phi.dot(matrix_only.stiffness * phi);
        rep.energy_inclusion = phi.dot(inclusion_only.stiffness * phi);
    }
    return rep;
}

namespace {

// C^2 plateau cutoff: 1 on |t| <= 1/4, 0 for |t| >= 1/2.
double cutoff1d(double t) {
    const double a = std::abs(t);
    if (a <= 0.25) return 1.0;
    if (a >= 0.5) return 0.0;
    const double s = (a - 0.25) * 4.0;
    return 1.0 - s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);
}

struct ShapeField {
    Mesh mesh;
    Eigen::MatrixXd columns;  // n_dofs x 2
    const AssembledForms* forms = nullptr;
    std::shared_ptr<AssembledForms> storage;

    // P1 interpolation of the matrix field [b1 | b2] at a reference point;
    // zero outside (Dirichlet boundary values extend by zero).
    Eigen::Matrix2d eval(const Vec2& p) const {
        for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
            const Vec2& a = mesh.nodes[mesh.triangles[t][0]];
            const Vec2& b = mesh.nodes[mesh.triangles[t][1]];
            const Vec2& c = mesh.nodes[mesh.triangles[t][2]];
            const double det = (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
            const double w1 = ((p.x() - a.x()) * (c.y() - a.y()) - (p.y() - a.y()) * (c.x() - a.x())) / det;
            const double w2 = ((b.x() - a.x()) * (p.y() - a.y()) - (b.y() - a.y()) * (p.x() - a.x())) / det;
            const double w0 = 1.0 - w1 - w2;
            const double tol = -1e-10;
            if (w0 < tol || w1 < tol || w2 < tol) continue;
            Eigen::Matrix2d out = Eigen::Matrix2d::Zero();
            const double w[3] = {w0, w1, w2};
            for (int i = 0; i < 3; ++i)
                for (int comp = 0; comp < 2; ++comp) {
                    const int d = forms->dof(mesh.triangles[t][i], comp);
                    if (d < 0) continue;
                    for (int col = 0; col < 2; ++col) out(comp, col) += w[i] * columns(d, col);
                }
            return out;
        }
        return Eigen::Matrix2d::Zero();
    }
};

}  // namespace

QuasimodeReport quasimode_residual(const InclusionModel& model, const ElasticityTensor& c0,
                                   const ElasticityTensor& c1, double lambda0,
                                   const QuasimodeOptions& opt) {
    const double eps = 1.0 / opt.n_cells;
    const Configuration cfg = generate_configuration(model, opt.n_cells, opt.seed);
    Mesh mesh = build_two_phase_mesh(cfg, opt.h_cell);
    mesh.scale_nodes(eps);

    // Periodic homogenized tensor from the one-cell problem and the
    // beta-matrix at lambda0 drive the dispersion solve.
    PhysicsSpec phys;
    phys.c0 = c0;
    BetaOptions bopt;
    bopt.h = opt.h_shape;
    BetaEvaluator beta_eval(model, phys, bopt);
    const BetaMatrix beta = beta_eval.beta(lambda0);
    if (beta.pole_flag) throw std::invalid_argument("quasimode: lambda0 inside a pole guard");

    const Configuration one_cell = generate_configuration(model, 1, opt.seed);
    const CellProblemResult cell = periodic_corrector(one_cell, c1, opt.h_cell);

    const DispersionSolution disp = dispersion(lambda0, opt.k_hat, cell.chom, beta);
    if (disp.roots.empty())
        throw std::runtime_error("quasimode: no propagating branch at lambda0");
    const double w = disp.roots.back().first;
    const Eigen::Vector2d pol = disp.roots.back().second;

    // Per-inclusion resolvent field on the scaled reference shape.
    std::map<long long, ShapeField> fields;
    auto field_for = [&](double scale) -> const ShapeField& {
        const long long key = std::llround(scale * 1e12);
        auto it = fields.find(key);
        if (it != fields.end()) return it->second;
        InclusionShape scaled = model.base_shape;
        for (auto& v : scaled.boundary) v *= scale;
        ShapeField sf;
        sf.mesh = build_shape_mesh(scaled, opt.h_shape * scale);
        sf.storage = std::make_shared<AssembledForms>(
            assemble_elasticity(sf.mesh, c0, BcKind::dirichlet));
        sf.forms = sf.storage.get();
        sf.columns = solve_b_lambda_on(*sf.storage, lambda0, 1.0).columns;
        return fields.emplace(key, std::move(sf)).first->second;
    };

    // Node -> inclusion map: a node is interior to inclusion k when every
    // adjacent triangle carries tag k (boundary nodes stay matrix; b = 0
    // there by the Dirichlet condition).
    std::vector<int> node_incl(mesh.nodes.size(), -2);
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t)
        for (int k = 0; k < 3; ++k) {
            int& tag = node_incl[mesh.triangles[t][k]];
            if (tag == -2) tag = mesh.tri_inclusion[t];
            else if (tag != mesh.tri_inclusion[t]) tag = -1;
        }

    const AssembledForms forms = two_phase_forms(mesh, c0, c1, eps);
    const Vec2 center(0.5, 0.5);

    auto envelope = [&](const Vec2& x) -> Eigen::Vector2d {
        const double eta = cutoff1d((x.x() - center.x()) / opt.envelope_width) *
                           cutoff1d((x.y() - center.y()) / opt.envelope_width);
        return eta * std::cos(w * opt.k_hat.dot(x)) * pol;
    };

    Eigen::VectorXd u = Eigen::VectorXd::Zero(forms.n_dofs);
    Eigen::VectorXd u_plain = Eigen::VectorXd::Zero(forms.n_dofs);
    for (int n = 0; n < mesh.count_nodes(); ++n) {
        const Vec2 x = mesh.nodes[n];
        const Eigen::Vector2d env = envelope(x);
        Eigen::Vector2d val = env;
        const int k = node_incl[n];
        if (k >= 0) {
            const Placement& pl = cfg.placements[k];
            const Eigen::Matrix2d g =
                SymmetryOp{SymmetryOp::Kind::rotate_quarter, pl.rotation}.matrix();
            const Vec2 cell_center(pl.cell_x + 0.5, pl.cell_y + 0.5);
            const Vec2 local = g.transpose() * (x / eps - cell_center);
            const ShapeField& sf = field_for(pl.scale);
            const Eigen::Matrix2d b = g * sf.eval(local) * g.transpose();
            val += lambda0 * b * env;
        }
        for (int c = 0; c < 2; ++c) {
            const int d = forms.dof(n, c);
            if (d < 0) continue;
            u[d] = val[c];
            u_plain[d] = env[c];
        }
    }

    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> mass_ldlt(forms.mass);
    auto ratio = [&](const Eigen::VectorXd& v) {
        const Eigen::VectorXd r = forms.stiffness * v - lambda0 * (forms.mass * v);
        const double num = std::sqrt(r.dot(mass_ldlt.solve(r)));
        const double den = std::sqrt(v.dot(forms.mass * v));
        return num / den;
    };

    QuasimodeReport rep;
    rep.lambda0 = lambda0;
    rep.envelope_width = opt.envelope_width;
    rep.epsilon = eps;
    rep.wavenumber = w;
    rep.residual_ratio = ratio(u);
    rep.residual_ratio_uncorrected = ratio(u_plain);
    return rep;
}

}  // namespace hc
