#include <doctest.h>

#include <Eigen/Dense>
#include <random>

#include "sgwave/det_loop.hpp"
#include "sgwave/experiments.hpp"
#include "sgwave/mesh.hpp"
#include "sgwave/partition.hpp"
#include "sgwave/pcg.hpp"

using namespace sgwave;

namespace {

// Dense Schur complement of the reduced transient operator, eliminating the
// union of subdomain interiors; the implementation-independent oracle.
struct DenseOracle {
  Eigen::MatrixXd schur;
  std::vector<Index> iface_dofs;
};

DenseOracle dense_schur(const Mesh& mesh, const Partition& part, double alpha0, double alpha1,
                        double dt) {
  const DirichletReduction red = make_dirichlet_reduction(mesh);
  const SparseSym m = red.reduce(assemble_mass(mesh, 1.0));
  const SparseSym k = red.reduce(assemble_stiffness(mesh, Eigen::VectorXd::Ones(mesh.n_nodes())));
  const SparseSym c = rayleigh_damping(m, k, alpha0, alpha1);
  NewmarkParams params;
  params.dt = dt;
  const Eigen::MatrixXd kt(transient_stiffness(m, c, k, params));

  const InterfaceLayout layout = build_interface_layout(mesh, part, red);
  std::vector<Index> interior;
  for (const auto& sd : layout.sub) {
    interior.insert(interior.end(), sd.interior.begin(), sd.interior.end());
  }
  const Index ni = static_cast<Index>(interior.size());
  const Index ng = layout.n_iface();
  Eigen::MatrixXd a_ii(ni, ni), a_ig(ni, ng), a_gg(ng, ng);
  for (Index a = 0; a < ni; ++a) {
    for (Index b = 0; b < ni; ++b) a_ii(a, b) = kt(interior[a], interior[b]);
    for (Index b = 0; b < ng; ++b) a_ig(a, b) = kt(interior[a], layout.iface_dofs[b]);
  }
  for (Index a = 0; a < ng; ++a) {
    for (Index b = 0; b < ng; ++b) a_gg(a, b) = kt(layout.iface_dofs[a], layout.iface_dofs[b]);
  }
  DenseOracle oracle;
  oracle.schur = a_gg - a_ig.transpose() * a_ii.ldlt().solve(a_ig);
  oracle.iface_dofs = layout.iface_dofs;
  return oracle;
}

DetSolver make_solver(const Mesh& mesh, const Partition& part, double alpha0, double alpha1,
                      double dt, PrecondKind precond = PrecondKind::nn2, double tol = 1e-10) {
  NewmarkParams params;
  params.dt = dt;
  SolveOptions opt;
  opt.precond = precond;
  opt.tol = tol;
  opt.threads = 2;
  opt.store_full = true;
  return DetSolver(mesh, part, Eigen::VectorXd::Ones(mesh.n_nodes()), 1.0, alpha0, alpha1, params,
                   opt);
}

Eigen::VectorXd random_vector(Index n, unsigned seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::VectorXd v(n);
  for (Index i = 0; i < n; ++i) v[i] = dist(gen);
  return v;
}

}  // namespace

TEST_CASE("assembled local Schur matches the dense elimination oracle") {
  const Mesh mesh = build_unit_square_mesh(6, 6);

  for (const auto& [px, py] : std::vector<std::pair<int, int>>{{2, 1}, {2, 2}}) {
    const Partition part = partition_structured(mesh, px, py);
    DetSolver solver = make_solver(mesh, part, 0.2, 0.01, 0.05);
    const DenseOracle oracle = dense_schur(mesh, part, 0.2, 0.01, 0.05);

    const Eigen::VectorXd x = random_vector(static_cast<Index>(oracle.schur.rows()), 42);
    const Eigen::VectorXd sx = solver.schur().matvec(x);
    CHECK((sx - oracle.schur * x).lpNorm<Eigen::Infinity>() <= 1e-10 * oracle.schur.norm());

    CHECK(solver.schur().matvec(Eigen::VectorXd::Zero(x.size())).norm() == 0.0);
    CHECK(x.dot(sx) > 0.0);

    for (const auto& ls : solver.schur().locals) {
      CHECK((ls.S - ls.S.transpose()).lpNorm<Eigen::Infinity>() <= 1e-12 * (1 + ls.S.norm()));
    }
  }
}

TEST_CASE("subdomain without interior dofs keeps S = K~_GG") {
  // one cell per subdomain: the only free node is the shared center
  const Mesh mesh = build_unit_square_mesh(2, 2);
  const Partition part = partition_structured(mesh, 2, 2);
  DetSolver solver = make_solver(mesh, part, 0.0, 0.0, 0.1);
  REQUIRE(solver.schur().n_global == 1);
  const DenseOracle oracle = dense_schur(mesh, part, 0.0, 0.0, 0.1);
  const Eigen::VectorXd one = Eigen::VectorXd::Ones(1);
  CHECK(solver.schur().matvec(one)[0] == doctest::Approx(oracle.schur(0, 0)).epsilon(1e-12));
}

TEST_CASE("preconditioners are symmetric operators") {
  const Mesh mesh = build_unit_square_mesh(8, 8);
  const Partition part = partition_structured(mesh, 2, 2);
  DetSolver solver = make_solver(mesh, part, 0.2, 0.01, 0.05);
  const SchurSystem& schur = solver.schur();

  const Eigen::VectorXd r1 = random_vector(schur.n_global, 1);
  const Eigen::VectorXd r2 = random_vector(schur.n_global, 2);
  for (const PrecondKind kind : {PrecondKind::lumped, PrecondKind::nn1, PrecondKind::nn2}) {
    const LinearOp op = make_preconditioner(schur, kind);
    CHECK(r2.dot(op(r1)) == doctest::Approx(r1.dot(op(r2))).epsilon(1e-10));
  }
}

TEST_CASE("two-level preconditioner with one block and no corners is the exact inverse") {
  SchurSystem system;
  const Index n = 7;
  Eigen::MatrixXd a = Eigen::MatrixXd::Random(n, n);
  a = (a * a.transpose()).eval();
  a.diagonal().array() += n;

  LocalSchur ls;
  ls.S = a;
  ls.weights = Eigen::VectorXd::Ones(n);
  for (Index i = 0; i < n; ++i) {
    ls.gmap.push_back(i);
    ls.r_idx.push_back(i);
  }
  system.n_global = n;
  system.n_corner = 0;
  system.locals.push_back(std::move(ls));
  system.finalize(false);

  const Eigen::VectorXd r = random_vector(n, 3);
  const Eigen::VectorXd z = system.apply_nn2(r);
  CHECK((a * z - r).lpNorm<Eigen::Infinity>() <= 1e-10);

  const auto [x, report] = pcg([&](const Eigen::VectorXd& v) { return system.matvec(v); },
                               [&](const Eigen::VectorXd& v) { return system.apply_nn2(v); }, r,
                               1e-10, 50);
  CHECK(report.converged);
  CHECK(report.iterations == 1);
}

TEST_CASE("coarse operator dimensions, symmetry, and elimination algebra") {
  const Mesh mesh = build_unit_square_mesh(8, 8);
  const Partition part = partition_structured(mesh, 2, 2);
  DetSolver solver = make_solver(mesh, part, 0.1, 0.0, 0.05);
  const SchurSystem& schur = solver.schur();

  // full Dirichlet boundary leaves exactly the interior cross point
  REQUIRE(schur.n_corner == 1);
  const Eigen::MatrixXd& fcc = schur.coarse_operator();
  CHECK(fcc.rows() == 1);
  CHECK((fcc - fcc.transpose()).lpNorm<Eigen::Infinity>() <= 1e-12 * (1 + fcc.norm()));

  // dense oracle: solve the coupled (remaining + corner) system in one shot
  Index nr_total = 0;
  for (const auto& ls : schur.locals) nr_total += static_cast<Index>(ls.r_idx.size());
  const Index nc = schur.n_corner;
  Eigen::MatrixXd big = Eigen::MatrixXd::Zero(nr_total + nc, nr_total + nc);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nr_total + nc);
  Index row0 = 0;
  std::mt19937 gen(7);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<Eigen::VectorXd> fr_all, fc_all;
  for (const auto& ls : schur.locals) {
    const Index nr = static_cast<Index>(ls.r_idx.size());
    const Index ncs = static_cast<Index>(ls.c_idx.size());
    Eigen::VectorXd fr(nr), fc(ncs);
    for (Index a = 0; a < nr; ++a) fr[a] = dist(gen);
    for (Index a = 0; a < ncs; ++a) fc[a] = dist(gen);
    fr_all.push_back(fr);
    fc_all.push_back(fc);
    rhs.segment(row0, nr) = fr;
    for (Index a = 0; a < nr; ++a) {
      for (Index b = 0; b < nr; ++b) big(row0 + a, row0 + b) = ls.S(ls.r_idx[a], ls.r_idx[b]);
      for (Index b = 0; b < ncs; ++b) {
        const double v = ls.S(ls.r_idx[a], ls.c_idx[b]);
        big(row0 + a, nr_total + ls.corner_gmap[b]) = v;
        big(nr_total + ls.corner_gmap[b], row0 + a) = v;
      }
    }
    for (Index a = 0; a < ncs; ++a) {
      for (Index b = 0; b < ncs; ++b) {
        big(nr_total + ls.corner_gmap[a], nr_total + ls.corner_gmap[b]) +=
            ls.S(ls.c_idx[a], ls.c_idx[b]);
      }
      rhs[nr_total + ls.corner_gmap[a]] += fc[a];
    }
    row0 += nr;
  }
  const Eigen::VectorXd uc_oracle = big.ldlt().solve(rhs).tail(nc);

  // two-stage elimination through F_cc
  Eigen::VectorXd dc = Eigen::VectorXd::Zero(nc);
  for (size_t s = 0; s < schur.locals.size(); ++s) {
    const LocalSchur& ls = schur.locals[s];
    Eigen::VectorXd contrib = fc_all[s];
    if (!ls.r_idx.empty()) contrib -= ls.S_rc.transpose() * ls.Srr_llt.solve(fr_all[s]);
    for (size_t a = 0; a < ls.corner_gmap.size(); ++a) dc[ls.corner_gmap[a]] += contrib[a];
  }
  const Eigen::VectorXd uc = fcc.llt().solve(dc);
  CHECK((uc - uc_oracle).lpNorm<Eigen::Infinity>() <= 1e-9 * (1 + uc_oracle.lpNorm<Eigen::Infinity>()));
}

TEST_CASE("pcg basics") {
  Eigen::MatrixXd a(3, 3);
  a << 4, 1, 0, 1, 3, 1, 0, 1, 2;
  const LinearOp apply = [&](const Eigen::VectorXd& x) { return (a * x).eval(); };
  const LinearOp ident = [](const Eigen::VectorXd& x) { return x; };

  SUBCASE("zero rhs returns immediately") {
    const auto [x, rep] = pcg(apply, ident, Eigen::VectorXd::Zero(3), 1e-12, 10);
    CHECK(rep.converged);
    CHECK(rep.iterations == 0);
    CHECK(x.norm() == 0.0);
  }

  SUBCASE("plain CG terminates within n iterations") {
    Eigen::VectorXd b(3);
    b << 1, 2, 3;
    const auto [x, rep] = pcg(apply, ident, b, 1e-12, 10);
    CHECK(rep.converged);
    CHECK(rep.iterations <= 3);
    CHECK((a * x - b).norm() <= 1e-10);
  }

  SUBCASE("exact inverse converges in one iteration") {
    Eigen::VectorXd b(3);
    b << -1, 0.5, 2;
    const Eigen::MatrixXd ainv = a.inverse();
    const auto [x, rep] =
        pcg(apply, [&](const Eigen::VectorXd& r) { return (ainv * r).eval(); }, b, 1e-12, 10);
    CHECK(rep.converged);
    CHECK(rep.iterations == 1);
  }
}

TEST_CASE("DD trajectory matches the single-domain direct solve for every preconditioner") {
  const Mesh mesh = build_unit_square_mesh(16, 16);
  const Eigen::VectorXd u0 = gaussian_pulse(mesh, 0.7, 0.7, 1.0, 0.01);
  const Eigen::VectorXd v0 = Eigen::VectorXd::Zero(mesh.n_nodes());
  const double dt = 0.02;
  const int steps = 12;

  const Partition single = partition_structured(mesh, 1, 1);
  DetSolver direct = make_solver(mesh, single, 0.5445, 0.0174, dt);
  REQUIRE(direct.uses_direct());
  const TimeHistory ref = direct.run(u0, v0, steps);

  const Partition part = partition_structured(mesh, 2, 2);
  for (const PrecondKind kind : {PrecondKind::lumped, PrecondKind::nn1, PrecondKind::nn2}) {
    DetSolver solver = make_solver(mesh, part, 0.5445, 0.0174, dt, kind, 1e-12);
    const TimeHistory hist = solver.run(u0, v0, steps);
    double max_diff = 0.0;
    for (int s = 0; s <= steps; ++s) {
      max_diff = std::max(max_diff, (hist.full_u[s] - ref.full_u[s]).lpNorm<Eigen::Infinity>());
    }
    CHECK(max_diff <= 1e-8);
  }
}

TEST_CASE("zero forcing and zero initial conditions stay identically zero") {
  const Mesh mesh = build_unit_square_mesh(8, 8);
  const Partition part = partition_structured(mesh, 2, 2);
  DetSolver solver = make_solver(mesh, part, 0.1, 0.01, 0.05);
  const TimeHistory hist = solver.run(Eigen::VectorXd::Zero(mesh.n_nodes()),
                                      Eigen::VectorXd::Zero(mesh.n_nodes()), 5);
  for (const auto& u : hist.full_u) CHECK(u.norm() == 0.0);
}

TEST_CASE("pcg residual history decreases and runs are thread-count reproducible") {
  const Mesh mesh = build_unit_square_mesh(16, 16);
  const Partition part = partition_structured(mesh, 4, 2);
  const Eigen::VectorXd u0 = gaussian_pulse(mesh, 0.7, 0.7, 1.0, 0.01);
  const Eigen::VectorXd v0 = Eigen::VectorXd::Zero(mesh.n_nodes());

  NewmarkParams params;
  params.dt = 0.01;
  SolveOptions opt;
  opt.tol = 1e-10;
  opt.threads = 1;
  DetSolver s1(mesh, part, Eigen::VectorXd::Ones(mesh.n_nodes()), 1.0, 0.5445, 0.0174, params,
               opt);
  const TimeHistory h1 = s1.run(u0, v0, 8);
  opt.threads = 4;
  DetSolver s4(mesh, part, Eigen::VectorXd::Ones(mesh.n_nodes()), 1.0, 0.5445, 0.0174, params,
               opt);
  const TimeHistory h4 = s4.run(u0, v0, 8);

  REQUIRE(h1.reports.size() == h4.reports.size());
  for (size_t s = 0; s < h1.reports.size(); ++s) {
    const auto& ra = h1.reports[s].residual_history;
    const auto& rb = h4.reports[s].residual_history;
    REQUIRE(ra.size() == rb.size());
    for (size_t i = 0; i < ra.size(); ++i) CHECK(ra[i] == rb[i]);  // bitwise
    for (size_t i = 1; i < ra.size(); ++i) CHECK(ra[i] <= ra[i - 1] * (1.0 + 1e-9));
  }
}

TEST_CASE("probe recording matches full fields") {
  const Mesh mesh = build_unit_square_mesh(8, 8);
  const Partition part = partition_structured(mesh, 2, 2);
  NewmarkParams params;
  params.dt = 0.02;
  SolveOptions opt;
  opt.store_full = true;
  opt.probe_nodes = {nearest_node(mesh, 0.5, 0.5)};
  DetSolver solver(mesh, part, Eigen::VectorXd::Ones(mesh.n_nodes()), 1.0, 0.0, 0.0, params, opt);
  const Eigen::VectorXd u0 = gaussian_pulse(mesh, 0.5, 0.5, 1.0, 0.05);
  const TimeHistory hist = solver.run(u0, Eigen::VectorXd::Zero(mesh.n_nodes()), 4);
  const Index dof = solver.reduction().node_to_dof[opt.probe_nodes[0]];
  for (int s = 0; s <= 4; ++s) {
    CHECK(hist.probe_u(0, s) == hist.full_u[s][dof]);
  }
}

TEST_CASE("1D bar with several subdomains matches the direct solve") {
  // every 1D interface node is a cross point: the fine term vanishes and the
  // coarse problem alone makes the two-level preconditioner exact
  const Mesh bar = build_interval_mesh(40, 1.0);
  const Eigen::VectorXd coeff = Eigen::VectorXd::Constant(bar.n_nodes(), 5.0);
  NewmarkParams params;
  params.dt = 0.005;
  SolveOptions opt;
  opt.store_full = true;
  opt.tol = 1e-12;
  const ForceFn force = [&](double t) {
    Eigen::VectorXd f = Eigen::VectorXd::Zero(bar.n_nodes());
    f[bar.n_nodes() - 1] = std::sin(2.0 * M_PI * t);
    return f;
  };

  DetSolver direct(bar, partition_structured(bar, 1, 1), coeff, 1.0, 0.01, 0.001, params, opt);
  const TimeHistory ref = direct.run(Eigen::VectorXd::Zero(bar.n_nodes()),
                                     Eigen::VectorXd::Zero(bar.n_nodes()), 30, force);

  DetSolver dd(bar, partition_structured(bar, 4, 1), coeff, 1.0, 0.01, 0.001, params, opt);
  REQUIRE_FALSE(dd.uses_direct());
  const TimeHistory hist = dd.run(Eigen::VectorXd::Zero(bar.n_nodes()),
                                  Eigen::VectorXd::Zero(bar.n_nodes()), 30, force);
  double max_diff = 0.0;
  for (int s = 0; s <= 30; ++s) {
    max_diff = std::max(max_diff, (hist.full_u[s] - ref.full_u[s]).lpNorm<Eigen::Infinity>());
  }
  CHECK(max_diff <= 1e-10);
  // exact preconditioner: one PCG iteration per step
  for (const auto& rep : hist.reports) CHECK(rep.iterations == 1);
}
