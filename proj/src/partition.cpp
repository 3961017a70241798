#include "sgwave/partition.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

namespace sgwave {

Eigen::VectorXd RestrictionMap::gather(const Eigen::VectorXd& global) const {
  Eigen::VectorXd local(size());
  for (Index k = 0; k < size(); ++k) local[k] = global[index[k]];
  return local;
}

void RestrictionMap::scatter_add(const Eigen::VectorXd& local, Eigen::VectorXd& global) const {
  for (Index k = 0; k < size(); ++k) global[index[k]] += local[k];
}

namespace {

bool contains(const std::vector<Index>& sorted, Index v) {
  return std::binary_search(sorted.begin(), sorted.end(), v);
}

bool on_square_boundary(const Mesh& mesh, Index node) {
  const double eps = 1e-12;
  const double x = mesh.nodes(node, 0);
  const double y = mesh.nodes(node, 1);
  return x < eps || x > 1.0 - eps || y < eps || y > 1.0 - eps;
}

}  // namespace

NodeClass Partition::classify(Index node) const {
  if (contains(corner_nodes, node)) return NodeClass::corner;
  if (contains(global_interface, node)) return NodeClass::remaining;
  return NodeClass::interior;
}

int Partition::multiplicity_of(Index node) const {
  auto it = std::lower_bound(global_interface.begin(), global_interface.end(), node);
  if (it == global_interface.end() || *it != node) return 1;
  return multiplicity[static_cast<size_t>(it - global_interface.begin())];
}

Partition partition_structured(const Mesh& mesh, int px, int py) {
  if (mesh.dim == 1) py = 1;
  if (px < 1 || py < 1) throw std::invalid_argument("partition_structured: px, py must be >= 1");
  if (px > mesh.nx || (mesh.dim == 2 && py > mesh.ny)) {
    throw std::invalid_argument("partition_structured: more subdomains than cells");
  }

  Partition part;
  part.n_sub = px * py;
  part.subdomain_elements.resize(part.n_sub);

  // Cell ownership by floor-division of cell indices; cells recovered from
  // element centroids so the rule is independent of element ordering.
  for (Index e = 0; e < mesh.n_elements(); ++e) {
    double cx = 0.0, cy = 0.0;
    const int nv = mesh.dim + 1;
    for (int k = 0; k < nv; ++k) {
      cx += mesh.nodes(mesh.elements(e, k), 0);
      if (mesh.dim == 2) cy += mesh.nodes(mesh.elements(e, k), 1);
    }
    cx /= nv;
    cy /= nv;
    const int ci = std::min(mesh.nx - 1, static_cast<int>(cx * mesh.nx));
    const int sx = ci * px / mesh.nx;
    int s = sx;
    if (mesh.dim == 2) {
      const int cj = std::min(mesh.ny - 1, static_cast<int>(cy * mesh.ny));
      const int sy = cj * py / mesh.ny;
      s = sy * px + sx;
    }
    part.subdomain_elements[s].push_back(e);
  }

  // Node -> owning subdomains.
  std::vector<std::vector<int>> node_subs(mesh.n_nodes());
  part.subdomain_nodes.resize(part.n_sub);
  for (int s = 0; s < part.n_sub; ++s) {
    std::set<Index> nodes;
    for (Index e : part.subdomain_elements[s]) {
      for (int k = 0; k < mesh.dim + 1; ++k) nodes.insert(mesh.elements(e, k));
    }
    part.subdomain_nodes[s].assign(nodes.begin(), nodes.end());
    for (Index n : part.subdomain_nodes[s]) node_subs[n].push_back(s);
  }

  part.interior_nodes.resize(part.n_sub);
  part.interface_nodes.resize(part.n_sub);
  for (int s = 0; s < part.n_sub; ++s) {
    for (Index n : part.subdomain_nodes[s]) {
      if (node_subs[n].size() == 1) {
        part.interior_nodes[s].push_back(n);
      } else {
        part.interface_nodes[s].push_back(n);
      }
    }
  }

  for (Index n = 0; n < mesh.n_nodes(); ++n) {
    if (node_subs[n].size() >= 2) {
      part.global_interface.push_back(n);
      part.multiplicity.push_back(static_cast<int>(node_subs[n].size()));
    }
  }

  // Corner nodes: shared by more than two subdomains, or end nodes of
  // interface edges (where an interface meets the physical boundary). In 1D
  // every interface node is an isolated cross point, hence a corner.
  for (size_t k = 0; k < part.global_interface.size(); ++k) {
    const Index n = part.global_interface[k];
    bool corner = mesh.dim == 1 || part.multiplicity[k] > 2 || on_square_boundary(mesh, n);
    if (corner) {
      part.corner_nodes.push_back(n);
    } else {
      part.remaining_nodes.push_back(n);
    }
  }

  part.iface_to_global.resize(part.n_sub);
  for (int s = 0; s < part.n_sub; ++s) {
    for (Index n : part.interface_nodes[s]) {
      auto it = std::lower_bound(part.global_interface.begin(), part.global_interface.end(), n);
      part.iface_to_global[s].push_back(static_cast<Index>(it - part.global_interface.begin()));
    }
  }
  return part;
}

ScalingMap build_scaling(const Partition& partition) {
  ScalingMap scaling;
  scaling.weights.resize(partition.n_sub);
  for (int s = 0; s < partition.n_sub; ++s) {
    const auto& map = partition.iface_to_global[s];
    Eigen::VectorXd w(map.size());
    for (size_t k = 0; k < map.size(); ++k) {
      w[static_cast<Index>(k)] = 1.0 / partition.multiplicity[map[k]];
    }
    scaling.weights[s] = std::move(w);
  }
  return scaling;
}

std::string partition_csv(const Mesh& mesh, const Partition& partition) {
  std::ostringstream os;
  os << "node_id,class,multiplicity\n";
  for (Index n = 0; n < mesh.n_nodes(); ++n) {
    const NodeClass c = partition.classify(n);
    const char tag = c == NodeClass::corner ? 'c' : (c == NodeClass::remaining ? 'r' : 'I');
    os << n << "," << tag << "," << partition.multiplicity_of(n) << "\n";
  }
  return os.str();
}

}  // namespace sgwave
