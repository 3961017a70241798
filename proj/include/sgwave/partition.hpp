#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "sgwave/mesh.hpp"

namespace sgwave {

enum class NodeClass { interior, remaining, corner };

/// 0/1 selection map: gather picks target[k] = source[index[k]],
/// transpose application scatters with addition.
struct RestrictionMap {
  std::vector<Index> index;

  Index size() const { return static_cast<Index>(index.size()); }
  Eigen::VectorXd gather(const Eigen::VectorXd& global) const;
  void scatter_add(const Eigen::VectorXd& local, Eigen::VectorXd& global) const;
};

/// Non-overlapping element partition with interface node bookkeeping.
/// All node sets are mesh-node indices; interface positions refer to
/// the ordered global_interface list.
struct Partition {
  int n_sub = 0;
  std::vector<std::vector<Index>> subdomain_elements;
  std::vector<std::vector<Index>> subdomain_nodes;   // sorted per subdomain
  std::vector<std::vector<Index>> interior_nodes;    // sorted per subdomain
  std::vector<std::vector<Index>> interface_nodes;   // sorted per subdomain
  std::vector<Index> global_interface;               // sorted global node ids
  std::vector<Index> corner_nodes;                   // subset of global_interface
  std::vector<Index> remaining_nodes;                // subset of global_interface
  std::vector<int> multiplicity;                     // per global_interface entry

  // R_s at mesh level: local interface position -> global interface position.
  std::vector<std::vector<Index>> iface_to_global;

  NodeClass classify(Index node) const;  // node must be on some subdomain
  int multiplicity_of(Index node) const; // 1 for non-interface nodes
};

/// Partition-of-unity weights D_s on the local interface of each subdomain
/// (1 / multiplicity), satisfying sum_s R_s^T D_s R_s = I on the interface.
struct ScalingMap {
  std::vector<Eigen::VectorXd> weights;  // per subdomain, local interface order
};

// Cell-block ownership partition of a structured mesh. For 1D meshes py is
// ignored. Rejects more subdomains than cells along an axis.
Partition partition_structured(const Mesh& mesh, int px, int py);

ScalingMap build_scaling(const Partition& partition);

// CSV rows: node_id, class in {I, r, c}, multiplicity.
std::string partition_csv(const Mesh& mesh, const Partition& partition);

}  // namespace sgwave
