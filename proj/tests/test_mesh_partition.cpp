#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include "sgwave/mesh.hpp"
#include "sgwave/partition.hpp"

using namespace sgwave;

TEST_CASE("unit square mesh counts and boundary") {
  const Mesh mesh = build_unit_square_mesh(2, 2);
  CHECK(mesh.n_nodes() == 9);
  CHECK(mesh.n_elements() == 8);
  CHECK(mesh.dirichlet_nodes.size() == 8);
  CHECK(mesh.h == doctest::Approx(std::sqrt(2.0) / 2.0));

  CHECK_THROWS(build_unit_square_mesh(1, 4));
  CHECK_THROWS(build_unit_square_mesh(4, 1));

  const Mesh big = build_unit_square_mesh(64, 64);
  CHECK(big.n_nodes() == 4225);
  CHECK(big.n_nodes() - static_cast<Index>(big.dirichlet_nodes.size()) == 3969);
}

TEST_CASE("unit square mesh geometry invariants") {
  const Mesh mesh = build_unit_square_mesh(5, 3);
  double total_area = 0.0, max_edge = 0.0;
  for (Index e = 0; e < mesh.n_elements(); ++e) {
    const auto x = [&](int k) { return mesh.nodes(mesh.elements(e, k), 0); };
    const auto y = [&](int k) { return mesh.nodes(mesh.elements(e, k), 1); };
    const double det = (x(1) - x(0)) * (y(2) - y(0)) - (x(2) - x(0)) * (y(1) - y(0));
    CHECK(det > 0.0);  // positive orientation
    total_area += 0.5 * det;
    for (int k = 0; k < 3; ++k) {
      const int j = (k + 1) % 3;
      max_edge = std::max(max_edge, std::hypot(x(j) - x(k), y(j) - y(k)));
    }
  }
  CHECK(total_area == doctest::Approx(1.0));
  CHECK(mesh.h == doctest::Approx(max_edge));
}

TEST_CASE("interval mesh") {
  const Mesh bar = build_interval_mesh(100, 1.0);
  CHECK(bar.h == doctest::Approx(0.01));
  CHECK(bar.n_nodes() == 101);

  const Mesh tiny = build_interval_mesh(2, 1.0);
  CHECK(tiny.n_nodes() == 3);
  CHECK(tiny.dirichlet_nodes.size() == 1);
  CHECK(tiny.dirichlet_nodes[0] == 0);

  const Mesh ten = build_interval_mesh(10, 1.0);
  for (int k = 0; k <= 10; ++k) CHECK(ten.nodes(k, 0) == doctest::Approx(k / 10.0));

  CHECK_THROWS(build_interval_mesh(1, 1.0));
}

TEST_CASE("structured partition classification") {
  const Mesh mesh = build_unit_square_mesh(8, 8);

  SUBCASE("2x2: center node is a corner shared by four subdomains") {
    const Partition part = partition_structured(mesh, 2, 2);
    const Index center = nearest_node(mesh, 0.5, 0.5);
    CHECK(part.classify(center) == NodeClass::corner);
    CHECK(part.multiplicity_of(center) == 4);
  }

  SUBCASE("1x2: one interface line, endpoints corners, rest remaining") {
    const Partition part = partition_structured(mesh, 1, 2);
    CHECK(part.global_interface.size() == 9);  // one mesh line
    CHECK(part.corner_nodes.size() == 2);
    CHECK(part.remaining_nodes.size() == 7);
    for (Index n : part.corner_nodes) {
      const double x = mesh.nodes(n, 0);
      CHECK((x == doctest::Approx(0.0) || x == doctest::Approx(1.0)));
    }
  }

  SUBCASE("element lists partition the element set") {
    const Partition part = partition_structured(mesh, 2, 2);
    std::set<Index> seen;
    size_t total = 0;
    for (const auto& elems : part.subdomain_elements) {
      total += elems.size();
      seen.insert(elems.begin(), elems.end());
    }
    CHECK(total == static_cast<size_t>(mesh.n_elements()));
    CHECK(seen.size() == total);
  }

  SUBCASE("interior sets are disjoint across subdomains") {
    const Partition part = partition_structured(mesh, 2, 2);
    std::set<Index> seen;
    for (const auto& ints : part.interior_nodes) {
      for (Index n : ints) CHECK(seen.insert(n).second);
    }
  }

  SUBCASE("more subdomains than cells rejected") {
    CHECK_THROWS(partition_structured(mesh, 9, 1));
  }
}

TEST_CASE("4x4 partition of 64x64 mesh: multiplicity in {2, 4}") {
  const Mesh mesh = build_unit_square_mesh(64, 64);
  const Partition part = partition_structured(mesh, 4, 4);
  for (size_t k = 0; k < part.global_interface.size(); ++k) {
    const int m = part.multiplicity[k];
    CHECK((m == 2 || m == 4));
  }
  // corner + remaining partition the interface
  CHECK(part.corner_nodes.size() + part.remaining_nodes.size() == part.global_interface.size());
}

TEST_CASE("scaling weights and partition of unity") {
  const Mesh mesh = build_unit_square_mesh(8, 8);
  const Partition part = partition_structured(mesh, 2, 2);
  const ScalingMap scaling = build_scaling(part);

  const Index center = nearest_node(mesh, 0.5, 0.5);
  for (int s = 0; s < part.n_sub; ++s) {
    const auto& nodes = part.interface_nodes[s];
    for (size_t k = 0; k < nodes.size(); ++k) {
      const double w = scaling.weights[s][static_cast<Index>(k)];
      if (nodes[k] == center) {
        CHECK(w == doctest::Approx(0.25));
      } else {
        CHECK((w == doctest::Approx(0.5) || w == doctest::Approx(0.25)));
      }
    }
  }

  // sum_s R^T D R = I applied to a random interface vector, to 1e-14
  std::mt19937 gen(123);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::VectorXd v(part.global_interface.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = dist(gen);
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(v.size());
  for (int s = 0; s < part.n_sub; ++s) {
    const auto& map = part.iface_to_global[s];
    for (size_t k = 0; k < map.size(); ++k) {
      acc[map[k]] += scaling.weights[s][static_cast<Index>(k)] * v[map[k]];
    }
  }
  CHECK((acc - v).lpNorm<Eigen::Infinity>() <= 1e-14);
}

TEST_CASE("restriction map gather/scatter adjoint") {
  RestrictionMap map;
  map.index = {3, 0, 2};
  Eigen::VectorXd global(5);
  global << 10, 20, 30, 40, 50;
  const Eigen::VectorXd local = map.gather(global);
  CHECK(local[0] == 40);
  CHECK(local[1] == 10);
  CHECK(local[2] == 30);
  Eigen::VectorXd back = Eigen::VectorXd::Zero(5);
  map.scatter_add(local, back);
  CHECK(back[3] == 40);
  CHECK(back[1] == 0);
}

TEST_CASE("classification is stable under node renumbering") {
  const Mesh mesh = build_unit_square_mesh(6, 6);
  const Partition part = partition_structured(mesh, 2, 2);

  // reverse the node numbering and rebuild
  const Index nn = mesh.n_nodes();
  std::vector<Index> perm(nn);
  std::iota(perm.begin(), perm.end(), 0);
  std::reverse(perm.begin(), perm.end());
  Mesh permuted = mesh;
  for (Index i = 0; i < nn; ++i) permuted.nodes.row(perm[i]) = mesh.nodes.row(i);
  for (Index e = 0; e < mesh.n_elements(); ++e) {
    for (int k = 0; k < 3; ++k) permuted.elements(e, k) = perm[mesh.elements(e, k)];
  }
  permuted.dirichlet_nodes.clear();
  for (Index n : mesh.dirichlet_nodes) permuted.dirichlet_nodes.push_back(perm[n]);
  std::sort(permuted.dirichlet_nodes.begin(), permuted.dirichlet_nodes.end());

  const Partition part2 = partition_structured(permuted, 2, 2);
  std::set<Index> corners_mapped;
  for (Index n : part.corner_nodes) corners_mapped.insert(perm[n]);
  const std::set<Index> corners2(part2.corner_nodes.begin(), part2.corner_nodes.end());
  CHECK(corners_mapped == corners2);
  std::set<Index> rem_mapped;
  for (Index n : part.remaining_nodes) rem_mapped.insert(perm[n]);
  const std::set<Index> rem2(part2.remaining_nodes.begin(), part2.remaining_nodes.end());
  CHECK(rem_mapped == rem2);
}

TEST_CASE("partition csv export") {
  const Mesh mesh = build_unit_square_mesh(4, 4);
  const Partition part = partition_structured(mesh, 2, 2);
  const std::string csv = partition_csv(mesh, part);
  CHECK(csv.find("node_id,class,multiplicity") == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == mesh.n_nodes() + 1);
}

TEST_CASE("gather-then-scatter equals the multiplicity-weighted identity") {
  const Mesh mesh = build_unit_square_mesh(8, 8);
  const Partition part = partition_structured(mesh, 4, 2);
  std::mt19937 gen(5);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::VectorXd v(part.global_interface.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = dist(gen);

  Eigen::VectorXd acc = Eigen::VectorXd::Zero(v.size());
  for (int s = 0; s < part.n_sub; ++s) {
    RestrictionMap map;
    for (Index pos : part.iface_to_global[s]) map.index.push_back(pos);
    map.scatter_add(map.gather(v), acc);
  }
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    CHECK(acc[i] == doctest::Approx(part.multiplicity[i] * v[i]).epsilon(1e-14));
  }
}
