#pragma once

#include <Eigen/Core>

#include "sgwave/assembly.hpp"

namespace sgwave {

/// Newmark-beta constants; gamma = 1/2, zeta = 1/4 give the unconditionally
/// stable second-order average-acceleration scheme.
struct NewmarkParams {
  double gamma = 0.5;
  double zeta = 0.25;
  double dt = 0.0;

  // K~ = M / (zeta dt^2) + C gamma / (zeta dt) + K
  double mass_factor() const { return 1.0 / (zeta * dt * dt); }
  double damping_factor() const { return gamma / (zeta * dt); }
};

struct StateTriple {
  Eigen::VectorXd u, v, a;
  double t = 0.0;
};

SparseSym transient_stiffness(const SparseSym& mass, const SparseSym& damping,
                              const SparseSym& stiffness, const NewmarkParams& params);

// Predictors of Eqs.; f~ = f_next + M u~_m + C u~_c.
Eigen::VectorXd newmark_um(const StateTriple& state, const NewmarkParams& params);
Eigen::VectorXd newmark_uc(const StateTriple& state, const Eigen::VectorXd& um,
                           const NewmarkParams& params);
Eigen::VectorXd newmark_rhs(const StateTriple& state, const SparseSym& mass,
                            const SparseSym& damping, const NewmarkParams& params,
                            const Eigen::VectorXd& f_next);

// Advances velocity/acceleration consistent with the solved u_next.
StateTriple newmark_update(const StateTriple& state, const Eigen::VectorXd& u_next,
                           const NewmarkParams& params);

double cfl_timestep(double h, double c_max, double cfl);

// Rayleigh coefficients from two modal frequencies (rad/s) and damping ratios.
std::pair<double, double> rayleigh_calibrate(double omega_i, double omega_j,
                                             double xi_i, double xi_j);

}  // namespace sgwave
