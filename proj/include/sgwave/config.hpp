#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace sgwave {

/// Run configuration shared by all CLI drivers. Defaults follow the
/// experiment setup used throughout: CFL 0.65, sigma_g 0.1, three input
/// variables at order 2, output order 3, solver tolerance 1e-8.
struct RunConfig {
  std::string experiment;  // optional tag; must match the subcommand if set

  // mesh
  int nx = 33, ny = 33;       // unit-square cells
  int bar_n = 100;            // 1D elements (bar drivers)
  double bar_length = 1.0;

  // partition
  int px = 2, py = 2;

  // physics
  double sigma_g = 0.1;
  double bx = 1.0, by = 1.0;
  double g0 = 0.0;
  double alpha0 = 0.5445, alpha1 = 0.0174;  // calibrated Rayleigh coefficients
  double cfl = 0.65;
  std::optional<double> dt;   // overrides the CFL rule when set
  double t_final = 0.5;
  double density = 1.0;

  // stochastic discretization
  int n_vars = 3;
  int p_in = 2;
  int p_out = 3;

  // solver
  double tol = 1e-8;
  int max_iter = 500;
  std::string preconditioner = "nn2";

  // sampling
  int n_samples = 2000;
  std::uint64_t seed = 20240101;

  std::vector<std::array<double, 2>> probes{{0.5, 0.5}, {0.7, 0.7}, {0.2, 0.7}};
  bool probes_explicit = false;  // set when a config file lists probes
  std::vector<double> snapshot_times;
  std::string output_dir = "out";
  int threads = 0;  // 0 = hardware concurrency
};

// Parses and schema-checks a JSON config; unknown keys are rejected.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);

// Round-trip echo for run manifests.
std::string config_json(const RunConfig& config);

}  // namespace sgwave
