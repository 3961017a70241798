#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

namespace sgwave {

using Index = int;

/// Structured simplicial mesh of the unit interval or unit square.
/// Node coordinates are in meters; h is the longest element edge.
struct Mesh {
  int dim = 2;
  Eigen::MatrixXd nodes;       // n_nodes x dim
  Eigen::MatrixXi elements;    // n_elements x (dim + 1), node indices
  std::vector<Index> dirichlet_nodes;  // sorted, unique
  double h = 0.0;
  int nx = 0, ny = 0;          // structured cell counts (ny = 0 in 1D)

  Index n_nodes() const { return static_cast<Index>(nodes.rows()); }
  Index n_elements() const { return static_cast<Index>(elements.rows()); }
  bool is_dirichlet(Index node) const;
};

// nx, ny cells per side; every boundary node is Dirichlet.
Mesh build_unit_square_mesh(int nx, int ny);

// n segments on [0, length]; node 0 is Dirichlet (fixed end), node n free.
Mesh build_interval_mesh(int n, double length);

// Nearest mesh node to a physical point (ties broken by lower index).
Index nearest_node(const Mesh& mesh, double x, double y = 0.0);

std::string mesh_summary_json(const Mesh& mesh);

}  // namespace sgwave
