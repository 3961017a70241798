#pragma once

#include <Eigen/Core>
#include <functional>
#include <vector>

namespace sgwave {

struct PcgReport {
  int iterations = 0;
  bool converged = false;
  std::vector<double> residual_history;  // ||r|| / ||b|| per iteration
};

using LinearOp = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

/// Preconditioned conjugate gradients for SPD operators. Convergence is
/// declared on the true residual ||b - A x|| / ||b||; the recurrence residual
/// only triggers the (exact) check.
std::pair<Eigen::VectorXd, PcgReport> pcg(const LinearOp& apply_op, const LinearOp& apply_precond,
                                          const Eigen::VectorXd& rhs, double tol, int max_iter);

}  // namespace sgwave
