#include "hclab/cell_problem.hpp"

#include <Eigen/SparseCholesky>

#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <stdexcept>

namespace hc {

namespace {

// Union-find connectivity of the meshed (matrix) region across shared edges.
int component_count(const Mesh& mesh) {
    std::vector<int> parent(mesh.triangles.size());
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    std::map<std::pair<int, int>, int> edge_owner;
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t)
        for (int k = 0; k < 3; ++k) {
            int a = mesh.triangles[t][k], b = mesh.triangles[t][(k + 1) % 3];
            if (a > b) std::swap(a, b);
            auto [it, fresh] = edge_owner.try_emplace({a, b}, static_cast<int>(t));
            if (!fresh) parent[find(it->second)] = find(static_cast<int>(t));
        }
    int comps = 0;
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t)
        if (find(static_cast<int>(t)) == static_cast<int>(t)) ++comps;
    return comps;
}

}  // namespace

CellProblemResult periodic_corrector(const Configuration& cfg, const ElasticityTensor& c1,
                                     double h) {
    CellProblemResult out;
    out.h = h;
    out.mesh = std::make_shared<Mesh>(build_perforated_mesh(cfg, h, /*holes_dirichlet=*/false));
    if (component_count(*out.mesh) != 1)
        throw std::runtime_error("periodic_corrector: perforated matrix region is disconnected");

    out.forms = std::make_shared<AssembledForms>(assemble_elasticity(*out.mesh, c1, BcKind::periodic));
    const AssembledForms& forms = *out.forms;
    const Mesh& mesh = *out.mesh;

    out.matrix_area = forms.volume;
    out.window_area = static_cast<double>(cfg.window_side) * cfg.window_side;

    // Anchor one node (both components) to remove the rigid-translation
    // kernel of the periodic operator; the solve stays symmetric definite.
    int anchor_node = -1;
    for (int n = 0; n < mesh.count_nodes() && anchor_node < 0; ++n)
        if (forms.dof(n, 0) >= 0) anchor_node = n;
    const int a0 = forms.dof(anchor_node, 0), a1 = forms.dof(anchor_node, 1);

    std::vector<int> keep;
    keep.reserve(forms.n_dofs - 2);
    std::vector<int> remap(forms.n_dofs, -1);
    for (int d = 0; d < forms.n_dofs; ++d)
        if (d != a0 && d != a1) {
            remap[d] = static_cast<int>(keep.size());
            keep.push_back(d);
        }
    std::vector<Eigen::Triplet<double>> kt;
    for (int col = 0; col < forms.stiffness.outerSize(); ++col)
        for (Eigen::SparseMatrix<double>::InnerIterator it(forms.stiffness, col); it; ++it)
            if (remap[it.row()] >= 0 && remap[it.col()] >= 0)
                kt.emplace_back(remap[it.row()], remap[it.col()], it.value());
    Eigen::SparseMatrix<double> k_red(keep.size(), keep.size());
    k_red.setFromTriplets(kt.begin(), kt.end());

    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(k_red);
    if (ldlt.info() != Eigen::Success)
        throw std::runtime_error("periodic_corrector: factorization failed");

    const auto basis = symmetric_basis(2);
    out.correctors.resize(basis.size());
    std::vector<Eigen::VectorXd> loads(basis.size());
    for (std::size_t i = 0; i < basis.size(); ++i) {
        const Eigen::VectorXd f = constant_strain_load(mesh, forms, c1, basis[i]);
        loads[i] = f;
        Eigen::VectorXd f_red(keep.size());
        for (std::size_t d = 0; d < keep.size(); ++d) f_red[d] = f[keep[d]];
        const Eigen::VectorXd x_red = ldlt.solve(f_red);
        Eigen::VectorXd x = Eigen::VectorXd::Zero(forms.n_dofs);
        for (std::size_t d = 0; d < keep.size(); ++d) x[keep[d]] = x_red[d];
        // Zero mean over the perforated region, per component. Periodic
        // slaves alias their master dof, so walk each dof exactly once.
        for (int c = 0; c < 2; ++c) {
            const double mean = forms.comp_integral.col(c).dot(x) / forms.volume;
            std::vector<char> seen(forms.n_dofs, 0);
            for (int n = 0; n < mesh.count_nodes(); ++n) {
                const int d = forms.dof(n, c);
                if (d >= 0 && !seen[d]) {
                    x[d] -= mean;
                    seen[d] = 1;
                }
            }
        }
        out.correctors[i] = x;
        out.max_corrector_sym_grad_norm = std::max(
            out.max_corrector_sym_grad_norm, std::sqrt(sym_grad_norm_sq(mesh, forms, x)));
    }

    // Homogenized tensor, full-window normalization: the energy and flux
    // forms coincide by Galerkin orthogonality; the direct quartic loop is
    // kept as the independent cross-check.
    const Eigen::MatrixXd v_mandel = c1.mandel();
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            // Minimized energy: int C (xi_i + grad N_i).(xi_j + grad N_j)
            //   = |matrix| V_ij - f_i . N_j   with  K N = f,  f = -int C xi . grad phi.
            out.chom_mandel(i, j) =
                (out.matrix_area * v_mandel(i, j) - loads[i].dot(out.correctors[j])) /
                out.window_area;
            out.chom_mandel_direct(i, j) =
                strained_energy(mesh, forms, c1, basis[i], out.correctors[i], basis[j],
                                out.correctors[j]) /
                out.window_area;
        }

    out.chom = tensor_from_mandel(out.chom_mandel, 2);
    return out;
}

RveResult chom_rve(const InclusionModel& model, const ElasticityTensor& c1, int n_cells,
                   int samples, double h, std::uint64_t seed0) {
    if (samples < 1) throw std::invalid_argument("chom_rve: samples >= 1");
    RveResult out;
    Eigen::Matrix3d sum = Eigen::Matrix3d::Zero();
    for (int s = 0; s < samples; ++s) {
        const Configuration cfg = generate_configuration(model, n_cells, seed0 + s);
        const CellProblemResult cell = periodic_corrector(cfg, c1, h);
        out.samples.push_back(cell.chom_mandel);
        sum += cell.chom_mandel;
    }
    const Eigen::Matrix3d mean = sum / samples;
    Eigen::Matrix3d var = Eigen::Matrix3d::Zero();
    for (const auto& s : out.samples) {
        const Eigen::Matrix3d d = s - mean;
        var += d.cwiseProduct(d);
    }
    var /= samples;
    out.spread = var.cwiseSqrt();
    out.mean = tensor_from_mandel(mean, 2);
    return out;
}

}  // namespace hc
