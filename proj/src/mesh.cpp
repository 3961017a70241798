#include "sgwave/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

namespace sgwave {

bool Mesh::is_dirichlet(Index node) const {
  return std::binary_search(dirichlet_nodes.begin(), dirichlet_nodes.end(), node);
}

Mesh build_unit_square_mesh(int nx, int ny) {
  if (nx < 2 || ny < 2) {
    throw std::invalid_argument("build_unit_square_mesh: nx and ny must be >= 2");
  }
  const int npx = nx + 1, npy = ny + 1;
  Mesh mesh;
  mesh.dim = 2;
  mesh.nodes.resize(static_cast<Index>(npx) * npy, 2);
  for (int j = 0; j < npy; ++j) {
    for (int i = 0; i < npx; ++i) {
      const Index id = j * npx + i;
      mesh.nodes(id, 0) = static_cast<double>(i) / nx;
      mesh.nodes(id, 1) = static_cast<double>(j) / ny;
    }
  }
  // Two triangles per cell, diagonal from (i,j) to (i+1,j+1), CCW orientation.
  mesh.elements.resize(2 * nx * ny, 3);
  Index e = 0;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const Index a = j * npx + i;
      const Index b = j * npx + i + 1;
      const Index c = (j + 1) * npx + i + 1;
      const Index d = (j + 1) * npx + i;
      mesh.elements.row(e++) << a, b, c;
      mesh.elements.row(e++) << a, c, d;
    }
  }
  std::set<Index> bnd;
  for (int i = 0; i < npx; ++i) {
    bnd.insert(i);
    bnd.insert((npy - 1) * npx + i);
  }
  for (int j = 0; j < npy; ++j) {
    bnd.insert(j * npx);
    bnd.insert(j * npx + npx - 1);
  }
  mesh.dirichlet_nodes.assign(bnd.begin(), bnd.end());
  const double dx = 1.0 / nx, dy = 1.0 / ny;
  mesh.h = std::sqrt(dx * dx + dy * dy);  // diagonal is the longest edge
  mesh.nx = nx;
  mesh.ny = ny;
  return mesh;
}

Mesh build_interval_mesh(int n, double length) {
  if (n < 2) {
    throw std::invalid_argument("build_interval_mesh: n must be >= 2");
  }
  if (length <= 0.0) {
    throw std::invalid_argument("build_interval_mesh: length must be positive");
  }
  Mesh mesh;
  mesh.dim = 1;
  mesh.nodes.resize(n + 1, 1);
  for (int i = 0; i <= n; ++i) {
    mesh.nodes(i, 0) = length * static_cast<double>(i) / n;
  }
  mesh.elements.resize(n, 2);
  for (int i = 0; i < n; ++i) {
    mesh.elements.row(i) << i, i + 1;
  }
  mesh.dirichlet_nodes = {0};
  mesh.h = length / n;
  mesh.nx = n;
  return mesh;
}

Index nearest_node(const Mesh& mesh, double x, double y) {
  Index best = 0;
  double best_d = std::numeric_limits<double>::max();
  for (Index i = 0; i < mesh.n_nodes(); ++i) {
    const double dx = mesh.nodes(i, 0) - x;
    const double dy = (mesh.dim == 2) ? mesh.nodes(i, 1) - y : 0.0;
    const double d = dx * dx + dy * dy;
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

std::string mesh_summary_json(const Mesh& mesh) {
  std::ostringstream os;
  os << "{\"dim\": " << mesh.dim << ", \"nodes\": " << mesh.n_nodes()
     << ", \"elements\": " << mesh.n_elements() << ", \"h\": " << mesh.h
     << ", \"dirichlet_nodes\": " << mesh.dirichlet_nodes.size() << "}";
  return os.str();
}

}  // namespace sgwave
