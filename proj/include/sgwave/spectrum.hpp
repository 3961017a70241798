#pragma once

#include <Eigen/Core>
#include <utility>
#include <vector>

namespace sgwave {

struct SpectrumPeak {
  double freq_hz = 0.0;
  double magnitude = 0.0;
};

// One-sided DFT magnitude of a real time series; bin k maps to k / (N dt) Hz.
Eigen::VectorXd magnitude_spectrum(const Eigen::VectorXd& series, double dt);

// Two largest local maxima of the magnitude spectrum (DC excluded), with
// parabolic interpolation across the peak bin. Requires >= 64 samples.
std::pair<SpectrumPeak, SpectrumPeak> dominant_frequencies(const Eigen::VectorXd& series,
                                                           double dt);

}  // namespace sgwave
