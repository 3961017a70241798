#include "sgwave/lognormal.hpp"

#include <cmath>
#include <stdexcept>

namespace sgwave {

CoefficientField lognormal_pce(const KleExpansion& kle, const PceBasis& basis_in) {
  if (basis_in.n_vars() != kle.n_modes()) {
    throw std::invalid_argument("lognormal_pce: basis variables != KLE modes");
  }
  const Index nn = static_cast<Index>(kle.modes[0].phi.size());
  const int n_vars = kle.n_modes();

  std::vector<Eigen::VectorXd> g(n_vars);  // g_v(x) = sqrt(lambda_v) phi_v(x)
  for (int v = 0; v < n_vars; ++v) g[v] = std::sqrt(kle.modes[v].lambda) * kle.modes[v].phi;

  Eigen::VectorXd c0(nn);
  for (Index x = 0; x < nn; ++x) {
    double sum_sq = 0.0;
    for (int v = 0; v < n_vars; ++v) sum_sq += g[v][x] * g[v][x];
    c0[x] = std::exp(kle.mean + 0.5 * sum_sq);
  }

  CoefficientField field;
  field.terms.reserve(basis_in.size());
  for (int k = 0; k < basis_in.size(); ++k) {
    const MultiIndex& alpha = basis_in.index(k);
    Eigen::VectorXd term = c0;
    for (int v = 0; v < n_vars; ++v) {
      double norm = 1.0;
      for (int a = 2; a <= alpha[v]; ++a) norm *= a;
      if (alpha[v] > 0) {
        term.array() *= g[v].array().pow(alpha[v]) / std::sqrt(norm);
      }
    }
    field.terms.push_back(std::move(term));
  }
  return field;
}

}  // namespace sgwave
