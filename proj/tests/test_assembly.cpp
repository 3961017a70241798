#include <doctest.h>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include "sgwave/assembly.hpp"
#include "sgwave/mesh.hpp"

using namespace sgwave;

namespace {

Mesh single_unit_triangle() {
  // unit right triangle (0,0), (1,0), (0,1)
  Mesh mesh;
  mesh.dim = 2;
  mesh.nodes.resize(3, 2);
  mesh.nodes << 0, 0, 1, 0, 0, 1;
  mesh.elements.resize(1, 3);
  mesh.elements << 0, 1, 2;
  mesh.h = std::sqrt(2.0);
  mesh.nx = mesh.ny = 1;
  return mesh;
}

double sym_error(const SparseSym& op) {
  SparseSym diff = SparseSym(op.transpose()) - op;
  double out = 0.0;
  for (int k = 0; k < diff.outerSize(); ++k) {
    for (SparseSym::InnerIterator it(diff, k); it; ++it) out = std::max(out, std::abs(it.value()));
  }
  return out;
}

}  // namespace

TEST_CASE("single triangle stiffness matches hand integration") {
  const Mesh mesh = single_unit_triangle();
  const SparseSym k = assemble_stiffness(mesh, Eigen::VectorXd::Ones(3));
  Eigen::MatrixXd expected(3, 3);
  expected << 2, -1, -1, -1, 1, 0, -1, 0, 1;
  expected *= 0.5;
  CHECK((Eigen::MatrixXd(k) - expected).lpNorm<Eigen::Infinity>() <= 1e-14);
}

TEST_CASE("zero coefficient gives zero operator") {
  const Mesh mesh = build_unit_square_mesh(4, 4);
  const SparseSym k = assemble_stiffness(mesh, Eigen::VectorXd::Zero(mesh.n_nodes()));
  CHECK(Eigen::MatrixXd(k).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("Neumann-assembled stiffness annihilates constants") {
  const Mesh mesh = build_unit_square_mesh(12, 12);
  const SparseSym k = assemble_stiffness(mesh, Eigen::VectorXd::Constant(mesh.n_nodes(), 2.5));
  const Eigen::VectorXd r = k * Eigen::VectorXd::Ones(mesh.n_nodes());
  CHECK(r.lpNorm<Eigen::Infinity>() <= 1e-12);
  CHECK(sym_error(k) <= 1e-14);
}

TEST_CASE("1D element mass matrix") {
  const Mesh bar = build_interval_mesh(2, 1.0);
  const SparseSym m = assemble_mass(bar, 3.0);  // rho A = 3, l_e = 0.5
  const double me = 3.0 * 0.5 / 6.0;
  Eigen::MatrixXd expected(3, 3);
  expected << 2 * me, me, 0, me, 4 * me, me, 0, me, 2 * me;
  CHECK((Eigen::MatrixXd(m) - expected).lpNorm<Eigen::Infinity>() <= 1e-14);
}

TEST_CASE("total mass equals density times area") {
  const Mesh mesh = build_unit_square_mesh(7, 5);
  const SparseSym m = assemble_mass(mesh, 1.0);
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(mesh.n_nodes());
  CHECK(ones.dot(m * ones) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("triangle mass entries") {
  const Mesh mesh = single_unit_triangle();
  const SparseSym m = assemble_mass(mesh, 1.0);
  const double area = 0.5;
  const Eigen::MatrixXd md(m);
  for (int i = 0; i < 3; ++i) {
    CHECK(md(i, i) == doctest::Approx(area / 6.0));
    CHECK(md(i, (i + 1) % 3) == doctest::Approx(area / 12.0));
  }
}

TEST_CASE("bar stiffness element entries and static solution") {
  const Mesh bar = build_interval_mesh(100, 1.0);
  const SparseSym k = assemble_bar_stiffness(bar, 5.0, 1.0);
  // E A / l = 5 / 0.01 = 500
  const Eigen::MatrixXd kd(k);
  CHECK(kd(0, 0) == doctest::Approx(500.0));
  CHECK(kd(0, 1) == doctest::Approx(-500.0));
  CHECK(kd(50, 50) == doctest::Approx(1000.0));  // two elements share the node

  // fixed-free static pull: tip displacement F L / (E A)
  const DirichletReduction red = make_dirichlet_reduction(bar);
  const SparseSym kr = red.reduce(k);
  Eigen::VectorXd f = Eigen::VectorXd::Zero(red.n_dofs());
  f[red.node_to_dof[100]] = 2.0;
  Eigen::SimplicialLLT<SparseSym> llt(kr);
  REQUIRE(llt.info() == Eigen::Success);
  const Eigen::VectorXd u = llt.solve(f);
  CHECK(u[red.node_to_dof[100]] == doctest::Approx(2.0 / 5.0).epsilon(1e-10));

  CHECK_THROWS(assemble_bar_stiffness(bar, -1.0, 1.0));
}

TEST_CASE("Galerkin consistency: K x for a linear field gives boundary fluxes") {
  const Mesh bar = build_interval_mesh(10, 1.0);
  const SparseSym k = assemble_bar_stiffness(bar, 4.0, 0.5);  // EA = 2
  Eigen::VectorXd x(bar.n_nodes());
  for (Index i = 0; i < bar.n_nodes(); ++i) x[i] = bar.nodes(i, 0);
  const Eigen::VectorXd flux = k * x;
  CHECK(flux[0] == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(flux[10] == doctest::Approx(2.0).epsilon(1e-12));
  for (Index i = 1; i < 10; ++i) CHECK(std::abs(flux[i]) <= 1e-12);
}

TEST_CASE("rayleigh damping combinations") {
  const Mesh mesh = build_unit_square_mesh(4, 4);
  const SparseSym m = assemble_mass(mesh, 1.0);
  const SparseSym k = assemble_stiffness(mesh, Eigen::VectorXd::Ones(mesh.n_nodes()));

  const SparseSym zero = rayleigh_damping(m, k, 0.0, 0.0);
  CHECK(Eigen::MatrixXd(zero).lpNorm<Eigen::Infinity>() == 0.0);

  const SparseSym just_m = rayleigh_damping(m, k, 1.0, 0.0);
  CHECK((Eigen::MatrixXd(just_m) - Eigen::MatrixXd(m)).lpNorm<Eigen::Infinity>() == 0.0);

  const SparseSym c = rayleigh_damping(m, k, 0.5445, 0.0174);
  CHECK(sym_error(c) <= 1e-14);
  const Eigen::MatrixXd cd(c);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cd);
  CHECK(es.eigenvalues().minCoeff() >= -1e-12);

  CHECK_THROWS(rayleigh_damping(m, k, -0.1, 0.0));
}

TEST_CASE("dirichlet elimination") {
  SUBCASE("3x3-node mesh keeps one dof") {
    const Mesh mesh = build_unit_square_mesh(2, 2);
    const DirichletReduction red = make_dirichlet_reduction(mesh);
    CHECK(red.n_dofs() == 1);
    const SparseSym kr = red.reduce(assemble_stiffness(mesh, Eigen::VectorXd::Ones(9)));
    CHECK(kr.rows() == 1);
  }

  SUBCASE("no dirichlet nodes gives identity reduction") {
    Mesh mesh = build_unit_square_mesh(3, 3);
    mesh.dirichlet_nodes.clear();
    const DirichletReduction red = make_dirichlet_reduction(mesh);
    CHECK(red.n_dofs() == mesh.n_nodes());
    const Eigen::VectorXd v = Eigen::VectorXd::LinSpaced(mesh.n_nodes(), 0, 1);
    CHECK((red.expand(red.reduce_vector(v)) - v).norm() == 0.0);
  }

  SUBCASE("reduced stiffness is SPD") {
    const Mesh mesh = build_unit_square_mesh(8, 8);
    const DirichletReduction red = make_dirichlet_reduction(mesh);
    const SparseSym kr =
        red.reduce(assemble_stiffness(mesh, Eigen::VectorXd::Ones(mesh.n_nodes())));
    Eigen::SimplicialLLT<SparseSym> llt(kr);
    CHECK(llt.info() == Eigen::Success);
  }
}

TEST_CASE("coo export lists every stored entry") {
  const Mesh mesh = build_unit_square_mesh(2, 2);
  const SparseSym m = assemble_mass(mesh, 1.0);
  const std::string coo = operator_coo(m);
  CHECK(std::count(coo.begin(), coo.end(), '\n') == m.nonZeros());
}
