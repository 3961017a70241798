#include "sgwave/mc.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "sgwave/parallel.hpp"

namespace sgwave {

double NormalSampler::uniform() {
  return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
}

double NormalSampler::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * f;
  has_spare_ = true;
  return u * f;
}

Eigen::VectorXd NormalSampler::normal_vector(int n) {
  Eigen::VectorXd out(n);
  for (int i = 0; i < n; ++i) out[i] = normal();
  return out;
}

void McAccumulator::add(const Eigen::MatrixXd& sample) {
  if (count_ == 0) {
    mean_ = Eigen::MatrixXd::Zero(sample.rows(), sample.cols());
    m2_ = m3_ = m4_ = mean_;
  }
  const double n1 = count_;
  const double n = ++count_;
  const Eigen::ArrayXXd delta = sample.array() - mean_.array();
  const Eigen::ArrayXXd delta_n = delta / n;
  const Eigen::ArrayXXd delta_n2 = delta_n * delta_n;
  const Eigen::ArrayXXd term1 = delta * delta_n * n1;
  mean_.array() += delta_n;
  m4_.array() += term1 * delta_n2 * (n * n - 3.0 * n + 3.0) + 6.0 * delta_n2 * m2_.array() -
                 4.0 * delta_n * m3_.array();
  m3_.array() += term1 * delta_n * (n - 2.0) - 3.0 * delta_n * m2_.array();
  m2_.array() += term1;
}

Eigen::MatrixXd McAccumulator::variance() const {
  if (count_ < 2) return Eigen::MatrixXd::Zero(mean_.rows(), mean_.cols());
  return m2_ / (count_ - 1.0);
}

Eigen::MatrixXd McAccumulator::std_dev() const { return variance().cwiseSqrt(); }

Eigen::MatrixXd McAccumulator::standard_error() const {
  return std_dev() / std::sqrt(static_cast<double>(count_));
}

Eigen::MatrixXd McAccumulator::kurtosis() const {
  Eigen::ArrayXXd denom = m2_.array() * m2_.array();
  denom = denom.max(std::numeric_limits<double>::min());
  return (count_ * m4_.array() / denom).matrix();
}

McEstimate mc_run_storing(int n_samples, std::uint64_t seed, int n_vars, int threads,
                          const std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>& evaluate,
                          std::vector<Eigen::MatrixXd>& outputs, Eigen::MatrixXd& draws) {
  if (n_samples < 2) throw std::invalid_argument("mc_run: need at least two samples");
  NormalSampler sampler(seed);
  draws.resize(n_samples, n_vars);
  for (int m = 0; m < n_samples; ++m) {
    for (int v = 0; v < n_vars; ++v) draws(m, v) = sampler.normal();
  }
  outputs.assign(n_samples, Eigen::MatrixXd());
  parallel_for(n_samples, threads, [&](int m) {
    try {
      outputs[m] = evaluate(draws.row(m));
    } catch (const std::exception& e) {
      throw std::runtime_error("sample " + std::to_string(m) + " failed: " + e.what());
    }
  });

  McAccumulator acc;
  for (int m = 0; m < n_samples; ++m) acc.add(outputs[m]);

  McEstimate est;
  est.samples = n_samples;
  est.seed = seed;
  est.mean = acc.mean();
  est.std_dev = acc.std_dev();
  est.standard_error = acc.standard_error();
  est.kurtosis = acc.kurtosis();
  return est;
}

McEstimate mc_run(int n_samples, std::uint64_t seed, int n_vars, int threads,
                  const std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>& evaluate) {
  std::vector<Eigen::MatrixXd> outputs;
  Eigen::MatrixXd draws;
  return mc_run_storing(n_samples, seed, n_vars, threads, evaluate, outputs, draws);
}

std::vector<Eigen::MatrixXd> nisp_project(const std::vector<Eigen::MatrixXd>& outputs,
                                          const Eigen::MatrixXd& draws, const PceBasis& basis) {
  if (outputs.empty() || outputs.size() != static_cast<size_t>(draws.rows())) {
    throw std::invalid_argument("nisp_project: outputs and draws must align");
  }
  const int n_samples = static_cast<int>(outputs.size());
  std::vector<Eigen::MatrixXd> coeffs(
      basis.size(), Eigen::MatrixXd::Zero(outputs[0].rows(), outputs[0].cols()));
  for (int m = 0; m < n_samples; ++m) {
    const Eigen::VectorXd xi = draws.row(m);
    for (int j = 0; j < basis.size(); ++j) {
      coeffs[j] += outputs[m] * basis.eval(j, xi);
    }
  }
  for (auto& c : coeffs) c /= n_samples;
  return coeffs;
}

double analytic_solution_2d(double x, double y, double t, int mode_m, int mode_n, double speed) {
  return std::sin(mode_m * M_PI * x) * std::sin(mode_n * M_PI * y) *
         std::cos(speed * M_PI * std::sqrt(static_cast<double>(mode_m * mode_m + mode_n * mode_n)) * t);
}

ErrorCurve relative_error_curve(const std::vector<double>& times,
                                const std::vector<Eigen::VectorXd>& numeric,
                                const std::vector<Eigen::VectorXd>& analytic, double guard) {
  if (times.size() != numeric.size() || times.size() != analytic.size()) {
    throw std::invalid_argument("relative_error_curve: size mismatch");
  }
  double max_norm = 0.0;
  for (const auto& a : analytic) max_norm = std::max(max_norm, a.norm());

  ErrorCurve curve;
  curve.times = times;
  for (size_t i = 0; i < times.size(); ++i) {
    const double diff = (numeric[i] - analytic[i]).norm();
    const double ref = analytic[i].norm();
    curve.abs_error.push_back(diff);
    if (ref >= guard * max_norm && ref > 0.0) {
      const double rel = diff / ref;
      curve.rel_error.push_back(rel);
      curve.max_rel = std::max(curve.max_rel, rel);
    } else {
      curve.rel_error.push_back(std::numeric_limits<double>::quiet_NaN());
    }
  }
  return curve;
}

Histogram histogram(const Eigen::VectorXd& samples, int bins) {
  if (samples.size() < 1 || bins < 1) throw std::invalid_argument("histogram: bad input");
  const double lo = samples.minCoeff();
  const double hi = samples.maxCoeff();
  Histogram h;
  h.n_samples = static_cast<int>(samples.size());
  const double span = hi - lo;
  if (span < 1e-12 * std::max(1.0, std::max(std::abs(lo), std::abs(hi)))) {
    // degenerate sample set: single bin carrying all the mass
    h.centers = Eigen::VectorXd::Constant(1, lo);
    h.density = Eigen::VectorXd::Constant(1, 1.0);
    return h;
  }
  h.centers.resize(bins);
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(bins);
  const double width = span / bins;
  for (int b = 0; b < bins; ++b) h.centers[b] = lo + (b + 0.5) * width;
  for (Eigen::Index i = 0; i < samples.size(); ++i) {
    int b = static_cast<int>((samples[i] - lo) / width);
    b = std::min(bins - 1, std::max(0, b));
    counts[b] += 1.0;
  }
  h.density = counts / (h.n_samples * width);
  return h;
}

int count_peaks_smoothed(const Eigen::VectorXd& density, double frac) {
  const int n = static_cast<int>(density.size());
  if (n < 3) return n >= 1 ? 1 : 0;
  Eigen::VectorXd smooth(n);
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    int cnt = 0;
    for (int k = std::max(0, i - 2); k <= std::min(n - 1, i + 2); ++k) {
      acc += density[k];
      ++cnt;
    }
    smooth[i] = acc / cnt;
  }
  const double floor = frac * smooth.maxCoeff();
  int peaks = 0;
  for (int i = 0; i < n; ++i) {
    const bool left = i == 0 || smooth[i] > smooth[i - 1];
    const bool right = i + 1 == n || smooth[i] > smooth[i + 1];
    if (left && right && smooth[i] > floor) ++peaks;  // boundary bins count
  }
  return peaks;
}

}  // namespace sgwave
