#include "sgwave/newmark.hpp"

#include <stdexcept>

namespace sgwave {

SparseSym transient_stiffness(const SparseSym& mass, const SparseSym& damping,
                              const SparseSym& stiffness, const NewmarkParams& params) {
  if (params.dt <= 0.0) throw std::invalid_argument("transient_stiffness: dt must be positive");
  SparseSym out = params.mass_factor() * mass;
  if (damping.nonZeros() > 0) out += params.damping_factor() * damping;
  out += stiffness;
  return out;
}

Eigen::VectorXd newmark_um(const StateTriple& state, const NewmarkParams& params) {
  const double dt = params.dt, zeta = params.zeta;
  return (state.u + dt * state.v) / (zeta * dt * dt) +
         (1.0 - 2.0 * zeta) / (2.0 * zeta) * state.a;
}

Eigen::VectorXd newmark_uc(const StateTriple& state, const Eigen::VectorXd& um,
                           const NewmarkParams& params) {
  const double dt = params.dt, gamma = params.gamma;
  return gamma * dt * um - state.v - (1.0 - gamma) * dt * state.a;
}

Eigen::VectorXd newmark_rhs(const StateTriple& state, const SparseSym& mass,
                            const SparseSym& damping, const NewmarkParams& params,
                            const Eigen::VectorXd& f_next) {
  const Eigen::VectorXd um = newmark_um(state, params);
  Eigen::VectorXd rhs = f_next + mass * um;
  if (damping.nonZeros() > 0) {
    rhs += damping * newmark_uc(state, um, params);
  }
  return rhs;
}

StateTriple newmark_update(const StateTriple& state, const Eigen::VectorXd& u_next,
                           const NewmarkParams& params) {
  const double dt = params.dt, zeta = params.zeta, gamma = params.gamma;
  StateTriple next;
  next.u = u_next;
  next.a = (u_next - state.u - dt * state.v) / (zeta * dt * dt) -
           (1.0 - 2.0 * zeta) / (2.0 * zeta) * state.a;
  next.v = state.v + (1.0 - gamma) * dt * state.a + gamma * dt * next.a;
  next.t = state.t + dt;
  return next;
}

double cfl_timestep(double h, double c_max, double cfl) {
  if (h <= 0.0 || c_max <= 0.0 || cfl <= 0.0) {
    throw std::invalid_argument("cfl_timestep: all arguments must be positive");
  }
  return cfl * h / c_max;
}

std::pair<double, double> rayleigh_calibrate(double omega_i, double omega_j,
                                             double xi_i, double xi_j) {
  if (omega_i <= 0.0 || omega_j <= 0.0 || omega_i == omega_j) {
    throw std::invalid_argument("rayleigh_calibrate: distinct positive frequencies required");
  }
  // 1/2 [[1/wi, wi], [1/wj, wj]] [a0; a1] = [xi_i; xi_j]
  const double det = 0.25 * (omega_j / omega_i - omega_i / omega_j);
  const double alpha0 = (0.5 * omega_j * xi_i - 0.5 * omega_i * xi_j) / det;
  const double alpha1 = (0.5 / omega_i * xi_j - 0.5 / omega_j * xi_i) / det;
  return {alpha0, alpha1};
}

}  // namespace sgwave
