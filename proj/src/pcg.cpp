#include "sgwave/pcg.hpp"

#include <cmath>

namespace sgwave {

std::pair<Eigen::VectorXd, PcgReport> pcg(const LinearOp& apply_op, const LinearOp& apply_precond,
                                          const Eigen::VectorXd& rhs, double tol, int max_iter) {
  PcgReport report;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(rhs.size());
  const double bnorm = rhs.norm();
  if (bnorm == 0.0) {
    report.converged = true;
    report.residual_history.push_back(0.0);
    return {x, report};
  }

  Eigen::VectorXd r = rhs;
  Eigen::VectorXd z = apply_precond(r);
  Eigen::VectorXd p = z;
  double rz = r.dot(z);
  report.residual_history.push_back(1.0);

  for (int it = 0; it < max_iter; ++it) {
    const Eigen::VectorXd ap = apply_op(p);
    const double alpha = rz / p.dot(ap);
    x += alpha * p;
    r -= alpha * ap;
    ++report.iterations;
    double rel = r.norm() / bnorm;
    if (rel <= tol) {
      // recurrence hit the target; confirm with the true residual
      const Eigen::VectorXd r_true = rhs - apply_op(x);
      rel = r_true.norm() / bnorm;
      report.residual_history.push_back(rel);
      if (rel <= tol) {
        report.converged = true;
        return {x, report};
      }
      r = r_true;
    } else {
      report.residual_history.push_back(rel);
    }
    z = apply_precond(r);
    const double rz_next = r.dot(z);
    p = z + (rz_next / rz) * p;
    rz = rz_next;
  }
  return {x, report};
}

}  // namespace sgwave
