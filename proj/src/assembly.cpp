#include "sgwave/assembly.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace sgwave {

CoefficientField CoefficientField::constant(const Mesh& mesh, double value) {
  CoefficientField field;
  field.terms.push_back(Eigen::VectorXd::Constant(mesh.n_nodes(), value));
  return field;
}

namespace {

using Triplet = Eigen::Triplet<double>;

void add_element(std::vector<Triplet>& trips, const Eigen::MatrixXi& elements, Index e,
                 int nv, const Eigen::MatrixXd& local) {
  for (int a = 0; a < nv; ++a) {
    for (int b = 0; b < nv; ++b) {
      trips.emplace_back(elements(e, a), elements(e, b), local(a, b));
    }
  }
}

}  // namespace

SparseSym assemble_stiffness(const Mesh& mesh, const Eigen::VectorXd& coeff) {
  if (coeff.size() != mesh.n_nodes()) {
    throw std::invalid_argument("assemble_stiffness: coefficient not defined at all nodes");
  }
  std::vector<Triplet> trips;
  const int nv = mesh.dim + 1;
  trips.reserve(static_cast<size_t>(mesh.n_elements()) * nv * nv);

  if (mesh.dim == 1) {
    Eigen::MatrixXd local(2, 2);
    for (Index e = 0; e < mesh.n_elements(); ++e) {
      const Index i = mesh.elements(e, 0), j = mesh.elements(e, 1);
      const double len = std::abs(mesh.nodes(j, 0) - mesh.nodes(i, 0));
      if (len <= 0.0) throw std::runtime_error("assemble_stiffness: degenerate element");
      const double c = 0.5 * (coeff[i] + coeff[j]) / len;
      local << c, -c, -c, c;
      add_element(trips, mesh.elements, e, 2, local);
    }
  } else {
    Eigen::MatrixXd local(3, 3);
    for (Index e = 0; e < mesh.n_elements(); ++e) {
      const Index n0 = mesh.elements(e, 0), n1 = mesh.elements(e, 1), n2 = mesh.elements(e, 2);
      const double x0 = mesh.nodes(n0, 0), y0 = mesh.nodes(n0, 1);
      const double x1 = mesh.nodes(n1, 0), y1 = mesh.nodes(n1, 1);
      const double x2 = mesh.nodes(n2, 0), y2 = mesh.nodes(n2, 1);
      const double det = (x1 - x0) * (y2 - y0) - (x2 - x0) * (y1 - y0);
      if (det <= 0.0) throw std::runtime_error("assemble_stiffness: degenerate element");
      const double area = 0.5 * det;
      // grad phi_a = (b_a, c_a) / (2 area)
      const double b[3] = {y1 - y2, y2 - y0, y0 - y1};
      const double c[3] = {x2 - x1, x0 - x2, x1 - x0};
      const double cavg = (coeff[n0] + coeff[n1] + coeff[n2]) / 3.0;
      for (int a = 0; a < 3; ++a) {
        for (int bb = 0; bb < 3; ++bb) {
          local(a, bb) = cavg * (b[a] * b[bb] + c[a] * c[bb]) / (4.0 * area);
        }
      }
      add_element(trips, mesh.elements, e, 3, local);
    }
  }
  SparseSym op(mesh.n_nodes(), mesh.n_nodes());
  op.setFromTriplets(trips.begin(), trips.end());
  return op;
}

SparseSym assemble_mass(const Mesh& mesh, double density) {
  if (density <= 0.0) throw std::invalid_argument("assemble_mass: density must be positive");
  std::vector<Triplet> trips;
  if (mesh.dim == 1) {
    Eigen::MatrixXd local(2, 2);
    for (Index e = 0; e < mesh.n_elements(); ++e) {
      const Index i = mesh.elements(e, 0), j = mesh.elements(e, 1);
      const double len = std::abs(mesh.nodes(j, 0) - mesh.nodes(i, 0));
      const double m = density * len / 6.0;
      local << 2 * m, m, m, 2 * m;
      add_element(trips, mesh.elements, e, 2, local);
    }
  } else {
    Eigen::MatrixXd local(3, 3);
    for (Index e = 0; e < mesh.n_elements(); ++e) {
      const Index n0 = mesh.elements(e, 0), n1 = mesh.elements(e, 1), n2 = mesh.elements(e, 2);
      const double det = (mesh.nodes(n1, 0) - mesh.nodes(n0, 0)) * (mesh.nodes(n2, 1) - mesh.nodes(n0, 1)) -
                         (mesh.nodes(n2, 0) - mesh.nodes(n0, 0)) * (mesh.nodes(n1, 1) - mesh.nodes(n0, 1));
      const double area = 0.5 * det;
      const double m = density * area / 12.0;
      local << 2 * m, m, m, m, 2 * m, m, m, m, 2 * m;
      add_element(trips, mesh.elements, e, 3, local);
    }
  }
  SparseSym op(mesh.n_nodes(), mesh.n_nodes());
  op.setFromTriplets(trips.begin(), trips.end());
  return op;
}

SparseSym assemble_bar_stiffness(const Mesh& mesh, double modulus, double area) {
  if (mesh.dim != 1) throw std::invalid_argument("assemble_bar_stiffness: 1D mesh required");
  if (modulus <= 0.0 || area <= 0.0) {
    throw std::invalid_argument("assemble_bar_stiffness: E and A must be positive");
  }
  return assemble_stiffness(mesh, Eigen::VectorXd::Constant(mesh.n_nodes(), modulus * area));
}

SparseSym rayleigh_damping(const SparseSym& mass, const SparseSym& stiffness,
                           double alpha0, double alpha1) {
  if (alpha0 < 0.0 || alpha1 < 0.0) {
    throw std::invalid_argument("rayleigh_damping: coefficients must be nonnegative");
  }
  return alpha0 * mass + alpha1 * stiffness;
}

SparseSym DirichletReduction::reduce(const SparseSym& op) const {
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<size_t>(op.nonZeros()));
  for (int k = 0; k < op.outerSize(); ++k) {
    for (SparseSym::InnerIterator it(op, k); it; ++it) {
      const Index r = node_to_dof[it.row()];
      const Index c = node_to_dof[it.col()];
      if (r >= 0 && c >= 0) trips.emplace_back(r, c, it.value());
    }
  }
  SparseSym out(n_dofs(), n_dofs());
  out.setFromTriplets(trips.begin(), trips.end());
  return out;
}

Eigen::VectorXd DirichletReduction::reduce_vector(const Eigen::VectorXd& nodal) const {
  Eigen::VectorXd out(n_dofs());
  for (Index d = 0; d < n_dofs(); ++d) out[d] = nodal[dof_to_node[d]];
  return out;
}

Eigen::VectorXd DirichletReduction::expand(const Eigen::VectorXd& dofs) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(node_to_dof.size());
  for (Index d = 0; d < n_dofs(); ++d) out[dof_to_node[d]] = dofs[d];
  return out;
}

DirichletReduction make_dirichlet_reduction(const Mesh& mesh) {
  DirichletReduction red;
  red.node_to_dof.assign(mesh.n_nodes(), -1);
  for (Index n = 0; n < mesh.n_nodes(); ++n) {
    if (!mesh.is_dirichlet(n)) {
      red.node_to_dof[n] = static_cast<Index>(red.dof_to_node.size());
      red.dof_to_node.push_back(n);
    }
  }
  return red;
}

std::string operator_coo(const SparseSym& op) {
  std::ostringstream os;
  os.precision(17);
  for (int k = 0; k < op.outerSize(); ++k) {
    for (SparseSym::InnerIterator it(op, k); it; ++it) {
      os << it.row() << " " << it.col() << " " << it.value() << "\n";
    }
  }
  return os.str();
}

}  // namespace sgwave
