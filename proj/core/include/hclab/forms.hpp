#pragma once

#include "hclab/mesh.hpp"
#include "hclab/tensor.hpp"

#include <Eigen/Sparse>
#include <vector>

namespace hc {

enum class Physics { scalar, elasticity };
enum class BcKind { dirichlet, periodic, none };

/// One coefficient per material tag: a plain conductivity for scalar
/// physics, a stiffness tensor for elasticity. `factor` scales either.
struct Coefficient {
    double scalar = 1.0;
    ElasticityTensor tensor;
    double factor = 1.0;
};

/// Assembled P1 stiffness/mass pair on the free dofs, with constrained
/// (Dirichlet-eliminated / periodic-identified) dofs removed symmetrically.
struct AssembledForms {
    Eigen::SparseMatrix<double> stiffness;
    Eigen::SparseMatrix<double> mass;
    int block = 1;   // components per node
    int n_dofs = 0;
    std::vector<int> dof_of;        // node*block + comp -> free dof id, or -1
    Eigen::MatrixXd comp_integral;  // n_dofs x block: integral of each basis field vs e_c
    double volume = 0.0;            // meshed (matrix-part) area

    int dof(int node, int comp) const { return dof_of[node * block + comp]; }
};

/// Assembles stiffness int C sym(grad u) . sym(grad v) (elasticity) or
/// int c grad u . grad v (scalar) and the mass int u . v with exact P1
/// quadrature. `coefficients[m]` applies to triangles with material tag m.
/// Throws on non-elliptic coefficients or unpaired periodic nodes.
AssembledForms assemble_forms(const Mesh& mesh, Physics physics,
                              const std::vector<Coefficient>& coefficients, BcKind bc);

/// Convenience single-material overloads.
AssembledForms assemble_scalar(const Mesh& mesh, double c, BcKind bc);
AssembledForms assemble_elasticity(const Mesh& mesh, const ElasticityTensor& c, BcKind bc);

/// Nodal interpolation of a linear displacement field x -> xi * x (+ rigid
/// part) expressed on the free dofs; helper for energy identities.
Eigen::VectorXd interpolate_linear_field(const AssembledForms& forms, const Mesh& mesh,
                                         const Eigen::Matrix2d& xi);

/// Cell-problem load for the constant strain xi:
///   f[dof] = - integral over the mesh of C xi . sym(grad basis_dof).
Eigen::VectorXd constant_strain_load(const Mesh& mesh, const AssembledForms& forms,
                                     const ElasticityTensor& c, const Eigen::Matrix2d& xi);

/// Direct element-loop evaluation of int C (xi + sym grad u).(eta + sym grad v).
double strained_energy(const Mesh& mesh, const AssembledForms& forms, const ElasticityTensor& c,
                       const Eigen::Matrix2d& xi, const Eigen::VectorXd& u,
                       const Eigen::Matrix2d& eta, const Eigen::VectorXd& v);

/// Integral of |sym grad u|^2 over the mesh.
double sym_grad_norm_sq(const Mesh& mesh, const AssembledForms& forms, const Eigen::VectorXd& u);

}  // namespace hc
