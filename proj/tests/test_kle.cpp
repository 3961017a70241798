#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>

#include "sgwave/kle.hpp"
#include "sgwave/mc.hpp"
#include "sgwave/mesh.hpp"

using namespace sgwave;

namespace {

// Nystrom eigensolve of the exponential kernel on [0,1] with trapezoid
// weights; independent oracle for the analytic eigenpairs.
Eigen::VectorXd nystrom_eigenvalues(double b, int n_points, int n_modes) {
  Eigen::MatrixXd cov(n_points, n_points);
  Eigen::VectorXd w = Eigen::VectorXd::Constant(n_points, 1.0 / (n_points - 1));
  w[0] *= 0.5;
  w[n_points - 1] *= 0.5;
  for (int i = 0; i < n_points; ++i) {
    for (int j = 0; j < n_points; ++j) {
      const double xi = static_cast<double>(i) / (n_points - 1);
      const double xj = static_cast<double>(j) / (n_points - 1);
      cov(i, j) = std::exp(-std::abs(xi - xj) / b) * std::sqrt(w[i] * w[j]);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
  return es.eigenvalues().tail(n_modes).reverse();
}

}  // namespace

TEST_CASE("analytic 1D eigenvalues match the Nystrom oracle within 1 percent") {
  const auto modes = kle_eigens_1d(1.0, 5);
  const Eigen::VectorXd oracle = nystrom_eigenvalues(1.0, 201, 5);
  for (int n = 0; n < 5; ++n) {
    CHECK(modes[n].lambda == doctest::Approx(oracle[n]).epsilon(0.01));
    if (n > 0) CHECK(modes[n].lambda < modes[n - 1].lambda);  // strict decay
    CHECK(modes[n].lambda > 0.0);
  }
}

TEST_CASE("eigenfunctions are L2-normalized and the kernel is reconstructed") {
  const int n_modes = 20, n_points = 201;
  const auto modes = kle_eigens_1d(1.0, n_modes);

  // discrete quadrature normalization check (composite Simpson)
  const int nq = 4001;
  for (const auto& m : modes) {
    double acc = 0.0;
    for (int i = 0; i < nq; ++i) {
      const double x = static_cast<double>(i) / (nq - 1);
      const double v = kle_eigenfunction_1d(m, x);
      const double w = (i == 0 || i == nq - 1) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
      acc += w * v * v / (3.0 * (nq - 1));
    }
    CHECK(acc == doctest::Approx(1.0).epsilon(1e-8));
  }

  // truncated reconstruction within 5 percent relative Frobenius error
  Eigen::MatrixXd kernel(n_points, n_points), recon = Eigen::MatrixXd::Zero(n_points, n_points);
  for (int i = 0; i < n_points; ++i) {
    for (int j = 0; j < n_points; ++j) {
      const double xi = static_cast<double>(i) / (n_points - 1);
      const double xj = static_cast<double>(j) / (n_points - 1);
      kernel(i, j) = std::exp(-std::abs(xi - xj));
    }
  }
  for (const auto& m : modes) {
    Eigen::VectorXd phi(n_points);
    for (int i = 0; i < n_points; ++i) {
      phi[i] = kle_eigenfunction_1d(m, static_cast<double>(i) / (n_points - 1));
    }
    recon += m.lambda * phi * phi.transpose();
  }
  CHECK((kernel - recon).norm() / kernel.norm() <= 0.05);
}

TEST_CASE("sigma = 0 collapses the expansion to the mean") {
  const Mesh mesh = build_interval_mesh(10, 1.0);
  const KleExpansion kle = kle_exponential(0.0, 1.0, 1.0, 4, mesh, 0.7);
  for (const auto& m : kle.modes) CHECK(m.lambda == 0.0);
  const Eigen::VectorXd g = sample_gaussian_field(kle, Eigen::VectorXd::Ones(4));
  CHECK((g.array() - 0.7).abs().maxCoeff() == 0.0);
}

TEST_CASE("2D modes are tensor products sorted by eigenvalue") {
  const Mesh mesh = build_unit_square_mesh(8, 8);
  const KleExpansion kle = kle_exponential(0.5, 1.0, 1.0, 6, mesh);
  double trace_bound = 0.25 * 1.0;  // sigma^2 |D|
  double acc = 0.0;
  for (int n = 0; n < kle.n_modes(); ++n) {
    if (n > 0) CHECK(kle.modes[n].lambda <= kle.modes[n - 1].lambda);
    CHECK(kle.modes[n].lambda > 0.0);
    acc += kle.modes[n].lambda;
  }
  CHECK(acc <= trace_bound + 1e-12);
  CHECK(acc / trace_bound > 0.0);
}

TEST_CASE("field sampling linearity and covariance") {
  const Mesh mesh = build_interval_mesh(20, 1.0);
  const KleExpansion kle = kle_exponential(0.3, 0.5, 0.5, 5, mesh, 0.2);

  SUBCASE("zero draw returns the mean") {
    const Eigen::VectorXd g = sample_gaussian_field(kle, Eigen::VectorXd::Zero(5));
    CHECK((g.array() - 0.2).abs().maxCoeff() <= 1e-15);
  }

  SUBCASE("linearity in the germ") {
    NormalSampler sampler(5);
    const Eigen::VectorXd xi = sampler.normal_vector(5);
    const Eigen::VectorXd g1 = sample_gaussian_field(kle, xi);
    const Eigen::VectorXd g2 = sample_gaussian_field(kle, 2.0 * xi);
    CHECK(((g2.array() - 0.2) - 2.0 * (g1.array() - 0.2)).abs().maxCoeff() <= 1e-13);
  }

  SUBCASE("sampled covariance matches the truncated kernel within 3 SE") {
    const Index a = 3, bnode = 15;
    double truncated = 0.0;
    for (const auto& m : kle.modes) truncated += m.lambda * m.phi[a] * m.phi[bnode];
    NormalSampler sampler(11);
    const int n = 100000;
    double acc = 0.0, acc2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const Eigen::VectorXd g = sample_gaussian_field(kle, sampler.normal_vector(5));
      const double prod = (g[a] - 0.2) * (g[bnode] - 0.2);
      acc += prod;
      acc2 += prod * prod;
    }
    const double mean = acc / n;
    const double se = std::sqrt((acc2 / n - mean * mean) / n);
    CHECK(std::abs(mean - truncated) <= 3.0 * se);
  }

  SUBCASE("speed field is strictly positive") {
    NormalSampler sampler(17);
    for (int i = 0; i < 100; ++i) {
      const Eigen::VectorXd c = sample_speed_squared(kle, sampler.normal_vector(5));
      CHECK(c.minCoeff() > 0.0);
    }
  }
}

TEST_CASE("spectrum export") {
  const Mesh mesh = build_interval_mesh(4, 1.0);
  const KleExpansion kle = kle_exponential(1.0, 1.0, 1.0, 3, mesh);
  const std::string csv = kle_spectrum_csv(kle);
  CHECK(csv.find("n,lambda") == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
}
