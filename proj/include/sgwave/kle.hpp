#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "sgwave/mesh.hpp"

namespace sgwave {

struct KleMode {
  double lambda = 0.0;
  Eigen::VectorXd phi;  // nodal values, L2-normalized on the domain
};

/// Truncated Karhunen-Loeve expansion of a Gaussian process with exponential
/// covariance: g(x) = mean + sum_n xi_n sqrt(lambda_n) phi_n(x).
struct KleExpansion {
  double sigma = 0.0;
  double bx = 1.0, by = 1.0;  // correlation lengths
  double mean = 0.0;          // constant mean g0
  std::vector<KleMode> modes; // lambda descending

  int n_modes() const { return static_cast<int>(modes.size()); }
};

// Analytic eigenpairs of the exponential kernel on the unit interval/square;
// 2D modes are tensor products of the 1D solutions, sorted and truncated.
KleExpansion kle_exponential(double sigma, double bx, double by, int n_modes,
                             const Mesh& mesh, double mean = 0.0);

// Single lognormal germ: one mode with lambda = sigma^2 and phi = 1.
KleExpansion kle_single_variable(double sigma, double mean, const Mesh& mesh);

// 1D eigenpairs (unit variance) of exp(-|x-y|/b) on [0,1]; used by
// kle_exponential and exposed for spectrum export and verification.
struct Kle1dMode {
  double omega = 0.0;
  double lambda = 0.0;
  bool even = true;  // cosine branch about the interval midpoint
};
std::vector<Kle1dMode> kle_eigens_1d(double b, int n_modes);
double kle_eigenfunction_1d(const Kle1dMode& mode, double x);  // x in [0,1]

Eigen::VectorXd sample_gaussian_field(const KleExpansion& kle, const Eigen::VectorXd& xi);
// exp(g): the lognormal squared-wave-speed field, strictly positive.
Eigen::VectorXd sample_speed_squared(const KleExpansion& kle, const Eigen::VectorXd& xi);

std::string kle_spectrum_csv(const KleExpansion& kle);

}  // namespace sgwave
