#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "sgwave/pce.hpp"

namespace sgwave {

/// Deterministic normal sampler: mt19937_64 (standardized sequence) plus the
/// Marsaglia polar transform, so a seed reproduces bit-identically everywhere.
class NormalSampler {
 public:
  explicit NormalSampler(std::uint64_t seed) : gen_(seed) {}

  double uniform();  // [0, 1)
  double normal();
  Eigen::VectorXd normal_vector(int n);

 private:
  std::mt19937_64 gen_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Streaming mean/variance accumulator (Welford), elementwise over matrices.
class McAccumulator {
 public:
  void add(const Eigen::MatrixXd& sample);
  int count() const { return count_; }
  const Eigen::MatrixXd& mean() const { return mean_; }
  Eigen::MatrixXd variance() const;  // unbiased, 1/(M-1)
  Eigen::MatrixXd std_dev() const;
  Eigen::MatrixXd standard_error() const;  // std / sqrt(M)
  Eigen::MatrixXd kurtosis() const;        // raw fourth standardized moment

 private:
  int count_ = 0;
  Eigen::MatrixXd mean_, m2_, m3_, m4_;
};

struct McEstimate {
  int samples = 0;
  std::uint64_t seed = 0;
  Eigen::MatrixXd mean, std_dev, standard_error, kurtosis;
};

/// Draws all xi up front from one seeded stream, evaluates samples
/// concurrently into slots, and accumulates in sample order.
McEstimate mc_run(int n_samples, std::uint64_t seed, int n_vars, int threads,
                  const std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>& evaluate);

// Same machinery but also returns the per-sample outputs and draws
// (for NISP projection sharing the sample set).
McEstimate mc_run_storing(int n_samples, std::uint64_t seed, int n_vars, int threads,
                          const std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>& evaluate,
                          std::vector<Eigen::MatrixXd>& outputs, Eigen::MatrixXd& draws);

// MC projection u_j = (1/M) sum_m y(xi_m) psi_j(xi_m) over the given draws.
std::vector<Eigen::MatrixXd> nisp_project(const std::vector<Eigen::MatrixXd>& outputs,
                                          const Eigen::MatrixXd& draws, const PceBasis& basis);

// u(x, y, t) = sin(m pi x) sin(n pi y) cos(c pi sqrt(m^2+n^2) t).
double analytic_solution_2d(double x, double y, double t, int mode_m, int mode_n, double speed);

/// Relative error e(t) = ||U - U_hat|| / ||U|| over nodes, with instants where
/// the reference norm falls below guard * max_t ||U|| skipped (absolute error
/// reported there instead).
struct ErrorCurve {
  std::vector<double> times;
  std::vector<double> rel_error;  // NaN where skipped
  std::vector<double> abs_error;
  double max_rel = 0.0;           // over kept instants
};

ErrorCurve relative_error_curve(const std::vector<double>& times,
                                const std::vector<Eigen::VectorXd>& numeric,
                                const std::vector<Eigen::VectorXd>& analytic,
                                double guard = 0.1);

struct Histogram {
  Eigen::VectorXd centers;
  Eigen::VectorXd density;
  int n_samples = 0;
};

// Equal-width bins over the sample range; a degenerate range gives one bin.
Histogram histogram(const Eigen::VectorXd& samples, int bins);

// 5-bin moving average, then strict local maxima (boundary bins included)
// above frac * global max.
int count_peaks_smoothed(const Eigen::VectorXd& density, double frac = 0.05);

}  // namespace sgwave
