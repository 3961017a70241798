#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <string>
#include <vector>

#include "sgwave/mesh.hpp"

namespace sgwave {

using SparseSym = Eigen::SparseMatrix<double>;

/// Nodal values of the squared wave speed, one vector per PCE input term.
/// Term 0 is the mean field and must be strictly positive.
struct CoefficientField {
  std::vector<Eigen::VectorXd> terms;  // each of length n_nodes

  int n_terms() const { return static_cast<int>(terms.size()); }
  static CoefficientField constant(const Mesh& mesh, double value);
};

// P1 grad-grad operator weighted by the element average of the nodal
// coefficient. Dirichlet rows/cols are kept; eliminate separately.
SparseSym assemble_stiffness(const Mesh& mesh, const Eigen::VectorXd& coeff);

// Consistent P1 mass scaled by a constant density.
SparseSym assemble_mass(const Mesh& mesh, double density);

// 1D axial bar stiffness, element matrix (E A / l) [[1,-1],[-1,1]].
SparseSym assemble_bar_stiffness(const Mesh& mesh, double modulus, double area);

// Rayleigh damping C = alpha0 M + alpha1 K.
SparseSym rayleigh_damping(const SparseSym& mass, const SparseSym& stiffness,
                           double alpha0, double alpha1);

/// Homogeneous Dirichlet elimination: keeps the free dofs and remembers the
/// node <-> dof correspondence for scattering solutions back with zeros.
struct DirichletReduction {
  std::vector<Index> node_to_dof;  // -1 for constrained nodes
  std::vector<Index> dof_to_node;

  Index n_dofs() const { return static_cast<Index>(dof_to_node.size()); }
  SparseSym reduce(const SparseSym& op) const;
  Eigen::VectorXd reduce_vector(const Eigen::VectorXd& nodal) const;
  Eigen::VectorXd expand(const Eigen::VectorXd& dofs) const;  // zeros on boundary
};

DirichletReduction make_dirichlet_reduction(const Mesh& mesh);

// Coordinate-format text dump (row col value per line) for oracle cross-checks.
std::string operator_coo(const SparseSym& op);

}  // namespace sgwave
