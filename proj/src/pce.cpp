#include "sgwave/pce.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace sgwave {

std::int64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::int64_t out = 1;
  for (int i = 1; i <= k; ++i) out = out * (n - k + i) / i;
  return out;
}

std::vector<MultiIndex> multi_indices(int n_vars, int max_order) {
  if (n_vars < 1 || max_order < 0) throw std::invalid_argument("multi_indices: bad arguments");
  std::vector<MultiIndex> out;
  MultiIndex current(n_vars, 0);
  // graded order: total degree ascending, lexicographic within a degree
  auto emit = [&](auto&& self, int pos, int remaining) -> void {
    if (pos == n_vars - 1) {
      current[pos] = remaining;
      out.push_back(current);
      return;
    }
    for (int a = remaining; a >= 0; --a) {
      current[pos] = a;
      self(self, pos + 1, remaining - a);
    }
  };
  for (int degree = 0; degree <= max_order; ++degree) emit(emit, 0, degree);
  return out;
}

double hermite(int n, double x) {
  double prev = 1.0;
  if (n == 0) return prev;
  double cur = x;
  for (int k = 1; k < n; ++k) {
    const double next = x * cur - k * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

namespace {

double factorial(int n) {
  double out = 1.0;
  for (int i = 2; i <= n; ++i) out *= i;
  return out;
}

// <He_a He_b He_c> for a single standard Gaussian variable.
double hermite_triple(int a, int b, int c) {
  const int total = a + b + c;
  if (total % 2 != 0) return 0.0;
  const int s = total / 2;
  if (s < a || s < b || s < c) return 0.0;
  return factorial(a) * factorial(b) * factorial(c) /
         (factorial(s - a) * factorial(s - b) * factorial(s - c));
}

}  // namespace

PceBasis::PceBasis(int n_vars, int max_order)
    : n_vars_(n_vars), max_order_(max_order), indices_(multi_indices(n_vars, max_order)) {}

double PceBasis::eval(int k, const Eigen::VectorXd& xi) const {
  if (xi.size() != n_vars_) throw std::invalid_argument("PceBasis::eval: xi size mismatch");
  const MultiIndex& alpha = indices_[k];
  double out = 1.0;
  for (int v = 0; v < n_vars_; ++v) {
    if (alpha[v] > 0) out *= hermite(alpha[v], xi[v]) / std::sqrt(factorial(alpha[v]));
  }
  return out;
}

std::string PceBasis::indices_csv() const {
  std::ostringstream os;
  os << "term,total_order,exponents\n";
  for (int k = 0; k < size(); ++k) {
    const MultiIndex& alpha = indices_[k];
    os << k << "," << std::accumulate(alpha.begin(), alpha.end(), 0) << ",";
    for (int v = 0; v < n_vars_; ++v) os << (v ? ";" : "") << alpha[v];
    os << "\n";
  }
  return os.str();
}

TripleTensor triple_products(int n_vars, int order_in, int order_out) {
  if (order_in > order_out) {
    throw std::invalid_argument("triple_products: order_in must be <= order_out");
  }
  const auto input = multi_indices(n_vars, order_in);
  const auto output = multi_indices(n_vars, order_out);
  TripleTensor tensor;
  tensor.n_input = static_cast<int>(input.size());
  tensor.n_output = static_cast<int>(output.size());
  tensor.by_input.resize(input.size());
  for (size_t i = 0; i < input.size(); ++i) {
    for (size_t j = 0; j < output.size(); ++j) {
      for (size_t k = j; k < output.size(); ++k) {
        double value = 1.0;
        for (int v = 0; v < n_vars && value != 0.0; ++v) {
          const int a = input[i][v], b = output[j][v], c = output[k][v];
          const double t = hermite_triple(a, b, c);
          value *= t / std::sqrt(factorial(a) * factorial(b) * factorial(c));
        }
        if (value != 0.0) {
          tensor.by_input[i].push_back({static_cast<int>(j), static_cast<int>(k), value});
        }
      }
    }
  }
  return tensor;
}

void gauss_hermite(int n_points, Eigen::VectorXd& nodes, Eigen::VectorXd& weights) {
  if (n_points < 1) throw std::invalid_argument("gauss_hermite: need at least one point");
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n_points, n_points);
  for (int i = 1; i < n_points; ++i) {
    jacobi(i, i - 1) = jacobi(i - 1, i) = std::sqrt(static_cast<double>(i));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
  nodes = solver.eigenvalues();
  weights.resize(n_points);
  for (int i = 0; i < n_points; ++i) {
    const double v = solver.eigenvectors()(0, i);
    weights[i] = v * v;  // mu_0 = 1 for the standard normal weight
  }
}

TripleTensor triple_products_quadrature(int n_vars, int order_in, int order_out) {
  const auto input = multi_indices(n_vars, order_in);
  const auto output = multi_indices(n_vars, order_out);
  const int max_deg = order_in + 2 * order_out;
  const int n_points = max_deg / 2 + 2;
  Eigen::VectorXd x, w;
  gauss_hermite(n_points, x, w);

  // per-variable normalized Hermite table at the quadrature nodes
  const int max_order = std::max(order_in, order_out);
  Eigen::MatrixXd table(max_order + 1, n_points);
  for (int a = 0; a <= max_order; ++a) {
    for (int q = 0; q < n_points; ++q) {
      table(a, q) = hermite(a, x[q]) / std::sqrt(factorial(a));
    }
  }

  TripleTensor tensor;
  tensor.n_input = static_cast<int>(input.size());
  tensor.n_output = static_cast<int>(output.size());
  tensor.by_input.resize(input.size());
  std::vector<int> q(n_vars, 0);
  for (size_t i = 0; i < input.size(); ++i) {
    for (size_t j = 0; j < output.size(); ++j) {
      for (size_t k = j; k < output.size(); ++k) {
        double acc = 0.0;
        std::fill(q.begin(), q.end(), 0);
        while (true) {
          double term = 1.0;
          for (int v = 0; v < n_vars; ++v) {
            term *= w[q[v]] * table(input[i][v], q[v]) * table(output[j][v], q[v]) *
                    table(output[k][v], q[v]);
          }
          acc += term;
          int v = 0;
          while (v < n_vars && ++q[v] == n_points) q[v++] = 0;
          if (v == n_vars) break;
        }
        if (std::abs(acc) > 1e-12) {
          tensor.by_input[i].push_back({static_cast<int>(j), static_cast<int>(k), acc});
        }
      }
    }
  }
  return tensor;
}

}  // namespace sgwave
