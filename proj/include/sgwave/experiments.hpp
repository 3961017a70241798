#pragma once

#include <map>
#include <string>
#include <vector>

#include "sgwave/config.hpp"
#include "sgwave/det_loop.hpp"
#include "sgwave/kle.hpp"
#include "sgwave/lognormal.hpp"
#include "sgwave/mc.hpp"
#include "sgwave/sg.hpp"
#include "sgwave/spectrum.hpp"

namespace sgwave {

// Initial conditions used by the experiments.
Eigen::VectorXd gaussian_pulse(const Mesh& mesh, double x0, double y0, double beta, double alpha);
Eigen::VectorXd mode_shape(const Mesh& mesh, int mode_m, int mode_n);

// Conservative wave-speed bound for the CFL rule: max sqrt(c_0) * exp(3 sigma).
double conservative_cmax(const Eigen::VectorXd& mean_speed_sq, double sigma_g);

int resolve_threads(int requested);

/// Analytic verification: mode (m, n) on an nx x nx mesh, undamped, unit
/// speed; returns the nodal error curve against the closed-form solution.
struct AnalyticRun {
  double dt = 0.0;
  int steps = 0;
  ErrorCurve curve;
};
AnalyticRun run_analytic_verification(int nx, double cfl_or_dt, bool is_dt, double t_final,
                                      int mode_m, int mode_n, int threads);

// Same problem, fixed mesh, arbitrary dt: full reduced trajectories for
// step-halving studies.
struct ModeTrajectory {
  double dt = 0.0;
  std::vector<double> times;
  std::vector<Eigen::VectorXd> fields;  // reduced dofs
};
ModeTrajectory run_mode_trajectory(const Mesh& mesh, double dt, double t_final, int mode_m,
                                   int mode_n, int threads);

/// Preconditioner comparison on the deterministic pulse problem.
struct PrecondComparison {
  std::vector<int> subdomain_counts;
  std::map<std::string, std::vector<double>> mean_iterations;  // by preconditioner
};
PrecondComparison run_precond_comparison(int nx, double dt, double t_final,
                                         const std::vector<std::pair<int, int>>& partitions,
                                         int threads, double tol, int max_iter);

/// Stochastic Galerkin run of the unit-square pulse problem per the config.
struct SgRun {
  double dt = 0.0;
  int steps = 0;
  std::vector<Index> probe_nodes;
  SgHistory history;
  Mesh mesh;
};
SgRun run_sg_pulse(const RunConfig& cfg);

/// Monte-Carlo estimate of the same problem at the same time step; outputs are
/// (probe, step) matrices.
struct McRun {
  double dt = 0.0;
  int steps = 0;
  std::vector<Index> probe_nodes;
  McEstimate estimate;
};
McRun run_mc_pulse(const RunConfig& cfg, double dt_override = 0.0);

/// Undamped broadband run used to calibrate Rayleigh damping from the two
/// dominant response frequencies.
struct CalibrationRun {
  Eigen::VectorXd series;
  double dt = 0.0;
  SpectrumPeak peak_low, peak_high;
  double alpha0 = 0.0, alpha1 = 0.0;
};
CalibrationRun run_rayleigh_calibration(int nx, double t_final, double xi_damping, int threads);

/// Tip-forced cantilever bar with a lognormal elastic modulus.
struct BarModel {
  Mesh mesh;
  double modulus = 5.0, density = 1.0, area = 1.0;
  double alpha0 = 0.01, alpha1 = 0.001;
  double dt = 0.002;
  double force_amplitude = 1.0, force_omega = 2.0 * M_PI;
  double sigma_g = 0.1;  // lognormal modulus: E = exp(g0 + sigma xi), g0 = ln(E)
};

// Deterministic bar trajectory (tip-forced cantilever); full fields stored.
TimeHistory run_bar_deterministic(const BarModel& model, double t_final, int threads,
                                  double alpha0, double alpha1);

// Per-sample deterministic solve of the bar with lognormal modulus; outputs
// are (node, snapshot) displacement matrices.
McEstimate run_bar_mc(const BarModel& model, double t_final,
                      const std::vector<double>& snapshot_times, int n_samples,
                      std::uint64_t seed, int threads, std::vector<Eigen::MatrixXd>* outputs,
                      Eigen::MatrixXd* draws);

// Stochastic Galerkin solve of the bar (single germ); history over all nodes.
SgHistory run_bar_sg(const BarModel& model, double t_final, int p_in, int p_out, int threads,
                     std::vector<Eigen::VectorXd>* full_states = nullptr);

/// Closed-form pdf model: u(probe, t) evaluated with a single lognormal
/// wave speed c = exp(sigma xi + mu).
Eigen::VectorXd pdf_samples_analytic(double x, double y, double t, double mu_g, double sigma_g,
                                     int n_samples, std::uint64_t seed);

struct DriverResult {
  std::vector<std::string> outputs;
};

// CLI entry: runs one named experiment and writes its artifacts.
DriverResult run_driver(const std::string& command, const RunConfig& cfg,
                        const std::string& out_dir);
const std::vector<std::string>& driver_names();

}  // namespace sgwave
