#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

namespace sgwave {

using MultiIndex = std::vector<int>;

// All multi-indices in L variables with total order <= p, graded
// lexicographic, index 0 = zero index. Size C(L + p, p).
std::vector<MultiIndex> multi_indices(int n_vars, int max_order);

std::int64_t binomial(int n, int k);

// Probabilists' Hermite He_n(x).
double hermite(int n, double x);

/// Sparse triple-product tensor <psi_i psi_j psi_k> of the normalized basis,
/// restricted to i over the input expansion and j,k over the output one.
struct TripleTensor {
  struct Entry {
    int j, k;
    double value;
  };
  int n_input = 0;   // i < n_input
  int n_output = 0;  // j, k < n_output
  std::vector<std::vector<Entry>> by_input;  // entries with j <= k only

  template <typename F>
  void for_each(int i, F&& f) const {  // visits both (j,k) and (k,j)
    for (const Entry& e : by_input[i]) {
      f(e.j, e.k, e.value);
      if (e.j != e.k) f(e.k, e.j, e.value);
    }
  }
};

/// Orthonormal polynomial chaos basis over L standard Gaussian variables:
/// psi_k(xi) = prod_v He_{a_v}(xi_v) / sqrt(a_v!), <psi_j psi_k> = delta_jk.
class PceBasis {
 public:
  PceBasis(int n_vars, int max_order);

  int n_vars() const { return n_vars_; }
  int max_order() const { return max_order_; }
  int size() const { return static_cast<int>(indices_.size()); }
  const std::vector<MultiIndex>& indices() const { return indices_; }
  const MultiIndex& index(int k) const { return indices_[k]; }

  double eval(int k, const Eigen::VectorXd& xi) const;

  std::string indices_csv() const;

 private:
  int n_vars_;
  int max_order_;
  std::vector<MultiIndex> indices_;
};

// Closed-form tensor: per variable <He_a He_b He_c> = a! b! c! /
// ((s-a)! (s-b)! (s-c)!) when s = (a+b+c)/2 is an integer and the triangle
// inequality holds, zero otherwise; normalized by sqrt(a! b! c!).
TripleTensor triple_products(int n_vars, int order_in, int order_out);

// Quadrature cross-check of the same tensor (Gauss-Hermite, exact for the
// polynomial degrees involved). Used as a test oracle.
TripleTensor triple_products_quadrature(int n_vars, int order_in, int order_out);

// Nodes/weights for probabilists' Gauss-Hermite (weight = standard normal pdf).
void gauss_hermite(int n_points, Eigen::VectorXd& nodes, Eigen::VectorXd& weights);

}  // namespace sgwave
