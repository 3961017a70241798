#include "sgwave/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace sgwave {

Eigen::VectorXd magnitude_spectrum(const Eigen::VectorXd& series, double dt) {
  const int n = static_cast<int>(series.size());
  if (n < 2 || dt <= 0.0) throw std::invalid_argument("magnitude_spectrum: bad input");
  const int half = n / 2 + 1;
  Eigen::VectorXd mag(half);
  const double w0 = -2.0 * M_PI / n;
  for (int k = 0; k < half; ++k) {
    std::complex<double> acc(0.0, 0.0);
    for (int j = 0; j < n; ++j) {
      acc += series[j] * std::polar(1.0, w0 * k * j);
    }
    mag[k] = std::abs(acc);
  }
  return mag;
}

std::pair<SpectrumPeak, SpectrumPeak> dominant_frequencies(const Eigen::VectorXd& series,
                                                           double dt) {
  const int n = static_cast<int>(series.size());
  if (n < 64) throw std::invalid_argument("dominant_frequencies: need at least 64 samples");
  const Eigen::VectorXd mag = magnitude_spectrum(series, dt);
  const double df = 1.0 / (n * dt);

  std::vector<SpectrumPeak> peaks;
  for (int k = 1; k + 1 < mag.size(); ++k) {
    if (mag[k] > mag[k - 1] && mag[k] > mag[k + 1]) {
      // parabolic fit through the peak bin for sub-bin frequency
      const double a = mag[k - 1], b = mag[k], c = mag[k + 1];
      const double denom = a - 2.0 * b + c;
      const double shift = denom != 0.0 ? 0.5 * (a - c) / denom : 0.0;
      peaks.push_back({(k + shift) * df, b});
    }
  }
  if (peaks.size() < 2) throw std::runtime_error("dominant_frequencies: fewer than two peaks");
  std::partial_sort(peaks.begin(), peaks.begin() + 2, peaks.end(),
                    [](const SpectrumPeak& p, const SpectrumPeak& q) {
                      return p.magnitude > q.magnitude;
                    });
  return {peaks[0], peaks[1]};
}

}  // namespace sgwave
