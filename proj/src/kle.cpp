#include "sgwave/kle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <tuple>
#include <sstream>
#include <stdexcept>

namespace sgwave {

namespace {

constexpr double kHalfWidth = 0.5;  // [0,1] mapped to [-T, T]

double bisect(double lo, double hi, const std::function<double(double)>& f) {
  double flo = f(lo);
  const double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) {
    throw std::runtime_error("kle_eigens_1d: bracket failure in characteristic equation");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fmid = f(mid);
    if (fmid == 0.0) return mid;
    if ((fmid > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

std::vector<Kle1dMode> kle_eigens_1d(double b, int n_modes) {
  if (b <= 0.0) throw std::invalid_argument("kle_eigens_1d: correlation length must be positive");
  const double c = 1.0 / b;
  const double T = kHalfWidth;
  // Characteristic equations on [-T, T] (unit variance):
  //   even: tan(wT) = c / w,  odd: tan(wT) = -w / c
  const auto f_even = [&](double w) { return std::tan(w * T) - c / w; };
  const auto f_odd = [&](double w) { return std::tan(w * T) + w / c; };
  const auto pole = [&](int k) { return (0.5 + k) * M_PI / T; };

  std::vector<Kle1dMode> modes;
  const double nudge = 1e-9;
  {
    const double lo = nudge * pole(0), hi = pole(0) * (1.0 - nudge);
    modes.push_back({bisect(lo, hi, f_even), 0.0, true});
  }
  for (int m = 1; static_cast<int>(modes.size()) < n_modes; ++m) {
    const double lo = pole(m - 1), hi = pole(m);
    const double width = hi - lo;
    // one odd then one even root per pole interval
    modes.push_back({bisect(lo + nudge * width, hi - nudge * width, f_odd), 0.0, false});
    if (static_cast<int>(modes.size()) < n_modes) {
      modes.push_back({bisect(lo + nudge * width, hi - nudge * width, f_even), 0.0, true});
    }
  }
  modes.resize(n_modes);
  for (Kle1dMode& m : modes) m.lambda = 2.0 * c / (m.omega * m.omega + c * c);
  return modes;
}

double kle_eigenfunction_1d(const Kle1dMode& mode, double x) {
  const double T = kHalfWidth;
  const double xc = x - 0.5;
  const double w = mode.omega;
  if (mode.even) {
    return std::cos(w * xc) / std::sqrt(T + std::sin(2.0 * w * T) / (2.0 * w));
  }
  return std::sin(w * xc) / std::sqrt(T - std::sin(2.0 * w * T) / (2.0 * w));
}

KleExpansion kle_exponential(double sigma, double bx, double by, int n_modes,
                             const Mesh& mesh, double mean) {
  if (sigma < 0.0) throw std::invalid_argument("kle_exponential: sigma must be nonnegative");
  if (n_modes < 1) throw std::invalid_argument("kle_exponential: need at least one mode");
  KleExpansion kle;
  kle.sigma = sigma;
  kle.bx = bx;
  kle.by = by;
  kle.mean = mean;

  const Index nn = mesh.n_nodes();
  if (mesh.dim == 1) {
    const auto eigens = kle_eigens_1d(bx, n_modes);
    for (const Kle1dMode& m : eigens) {
      KleMode mode;
      mode.lambda = sigma * sigma * m.lambda;
      mode.phi.resize(nn);
      for (Index i = 0; i < nn; ++i) mode.phi[i] = kle_eigenfunction_1d(m, mesh.nodes(i, 0));
      kle.modes.push_back(std::move(mode));
    }
    return kle;
  }

  const auto ex = kle_eigens_1d(bx, n_modes);
  const auto ey = (by == bx) ? ex : kle_eigens_1d(by, n_modes);
  struct Pair {
    int i, j;
    double lambda;
  };
  std::vector<Pair> pairs;
  pairs.reserve(static_cast<size_t>(n_modes) * n_modes);
  for (int i = 0; i < n_modes; ++i) {
    for (int j = 0; j < n_modes; ++j) {
      pairs.push_back({i, j, ex[i].lambda * ey[j].lambda});
    }
  }
  std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
    if (a.lambda != b.lambda) return a.lambda > b.lambda;
    return std::tie(a.i, a.j) < std::tie(b.i, b.j);
  });
  pairs.resize(n_modes);

  for (const Pair& p : pairs) {
    KleMode mode;
    mode.lambda = sigma * sigma * p.lambda;
    mode.phi.resize(nn);
    for (Index n = 0; n < nn; ++n) {
      mode.phi[n] = kle_eigenfunction_1d(ex[p.i], mesh.nodes(n, 0)) *
                    kle_eigenfunction_1d(ey[p.j], mesh.nodes(n, 1));
    }
    kle.modes.push_back(std::move(mode));
  }
  return kle;
}

KleExpansion kle_single_variable(double sigma, double mean, const Mesh& mesh) {
  KleExpansion kle;
  kle.sigma = sigma;
  kle.mean = mean;
  KleMode mode;
  mode.lambda = sigma * sigma;
  mode.phi = Eigen::VectorXd::Ones(mesh.n_nodes());
  kle.modes.push_back(std::move(mode));
  return kle;
}

Eigen::VectorXd sample_gaussian_field(const KleExpansion& kle, const Eigen::VectorXd& xi) {
  if (xi.size() != kle.n_modes()) {
    throw std::invalid_argument("sample_gaussian_field: xi size mismatch");
  }
  Eigen::VectorXd g = Eigen::VectorXd::Constant(kle.modes[0].phi.size(), kle.mean);
  for (int n = 0; n < kle.n_modes(); ++n) {
    g += xi[n] * std::sqrt(kle.modes[n].lambda) * kle.modes[n].phi;
  }
  return g;
}

Eigen::VectorXd sample_speed_squared(const KleExpansion& kle, const Eigen::VectorXd& xi) {
  return sample_gaussian_field(kle, xi).array().exp();
}

std::string kle_spectrum_csv(const KleExpansion& kle) {
  std::ostringstream os;
  os.precision(17);
  os << "n,lambda\n";
  for (int n = 0; n < kle.n_modes(); ++n) os << n + 1 << "," << kle.modes[n].lambda << "\n";
  return os.str();
}

}  // namespace sgwave
