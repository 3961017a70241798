#include "sgwave/experiments.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <stdexcept>

#include "sgwave/io.hpp"
#include "sgwave/parallel.hpp"
#include "sgwave/partition.hpp"

namespace sgwave {

Eigen::VectorXd gaussian_pulse(const Mesh& mesh, double x0, double y0, double beta, double alpha) {
  Eigen::VectorXd u(mesh.n_nodes());
  for (Index i = 0; i < mesh.n_nodes(); ++i) {
    const double dx = mesh.nodes(i, 0) - x0;
    const double dy = mesh.dim == 2 ? mesh.nodes(i, 1) - y0 : 0.0;
    u[i] = beta * std::exp(-(dx * dx + dy * dy) / alpha);
  }
  return u;
}

Eigen::VectorXd mode_shape(const Mesh& mesh, int mode_m, int mode_n) {
  Eigen::VectorXd u(mesh.n_nodes());
  for (Index i = 0; i < mesh.n_nodes(); ++i) {
    u[i] = std::sin(mode_m * M_PI * mesh.nodes(i, 0)) * std::sin(mode_n * M_PI * mesh.nodes(i, 1));
  }
  return u;
}

double conservative_cmax(const Eigen::VectorXd& mean_speed_sq, double sigma_g) {
  return std::sqrt(mean_speed_sq.maxCoeff()) * std::exp(3.0 * sigma_g);
}

int resolve_threads(int requested) { return requested > 0 ? requested : default_threads(); }

AnalyticRun run_analytic_verification(int nx, double cfl_or_dt, bool is_dt, double t_final,
                                      int mode_m, int mode_n, int threads) {
  const Mesh mesh = build_unit_square_mesh(nx, nx);
  const ModeTrajectory traj = run_mode_trajectory(
      mesh, is_dt ? cfl_or_dt : cfl_timestep(mesh.h, 1.0, cfl_or_dt), t_final, mode_m, mode_n,
      threads);

  const DirichletReduction red = make_dirichlet_reduction(mesh);
  std::vector<Eigen::VectorXd> exact(traj.times.size());
  for (size_t s = 0; s < traj.times.size(); ++s) {
    Eigen::VectorXd field(red.n_dofs());
    for (Index d = 0; d < red.n_dofs(); ++d) {
      const Index node = red.dof_to_node[d];
      field[d] = analytic_solution_2d(mesh.nodes(node, 0), mesh.nodes(node, 1), traj.times[s],
                                      mode_m, mode_n, 1.0);
    }
    exact[s] = std::move(field);
  }
  AnalyticRun out;
  out.dt = traj.dt;
  out.steps = static_cast<int>(traj.times.size()) - 1;
  out.curve = relative_error_curve(traj.times, traj.fields, exact);
  return out;
}

ModeTrajectory run_mode_trajectory(const Mesh& mesh, double dt, double t_final, int mode_m,
                                   int mode_n, int threads) {
  const Partition part = partition_structured(mesh, 1, 1);
  NewmarkParams params;
  params.dt = dt;
  SolveOptions opt;
  opt.threads = threads;
  opt.store_full = true;
  DetSolver solver(mesh, part, Eigen::VectorXd::Ones(mesh.n_nodes()), 1.0, 0.0, 0.0, params, opt);
  const int steps = static_cast<int>(std::ceil(t_final / dt - 1e-12));
  TimeHistory hist = solver.run(mode_shape(mesh, mode_m, mode_n),
                                Eigen::VectorXd::Zero(mesh.n_nodes()), steps);
  ModeTrajectory traj;
  traj.dt = dt;
  traj.times = std::move(hist.times);
  traj.fields = std::move(hist.full_u);
  return traj;
}

PrecondComparison run_precond_comparison(int nx, double dt, double t_final,
                                         const std::vector<std::pair<int, int>>& partitions,
                                         int threads, double tol, int max_iter) {
  const Mesh mesh = build_unit_square_mesh(nx, nx);
  const Eigen::VectorXd u0 = gaussian_pulse(mesh, 0.7, 0.7, 1.0, 0.01);
  const Eigen::VectorXd v0 = Eigen::VectorXd::Zero(mesh.n_nodes());
  // calibrated Rayleigh coefficients used across the experiments
  const double alpha0 = 0.5445, alpha1 = 0.0174;
  NewmarkParams params;
  params.dt = dt;
  const int steps = static_cast<int>(std::ceil(t_final / dt - 1e-12));

  PrecondComparison cmp;
  for (const auto& [px, py] : partitions) {
    const Partition part = partition_structured(mesh, px, py);
    SolveOptions opt;
    opt.threads = threads;
    opt.tol = tol;
    opt.max_iter = max_iter;
    DetSolver solver(mesh, part, Eigen::VectorXd::Ones(mesh.n_nodes()), 1.0, alpha0, alpha1,
                     params, opt);
    cmp.subdomain_counts.push_back(px * py);
    for (const char* name : {"lumped", "nn1", "nn2"}) {
      solver.set_preconditioner(precond_from_string(name));
      const TimeHistory hist = solver.run(u0, v0, steps);
      cmp.mean_iterations[name].push_back(hist.mean_iterations());
    }
  }
  return cmp;
}

SgRun run_sg_pulse(const RunConfig& cfg) {
  SgRun run;
  run.mesh = build_unit_square_mesh(cfg.nx, cfg.ny);
  const Mesh& mesh = run.mesh;
  const KleExpansion kle = kle_exponential(cfg.sigma_g, cfg.bx, cfg.by, cfg.n_vars, mesh, cfg.g0);
  const PceBasis basis_in(cfg.n_vars, cfg.p_in);
  const CoefficientField coeff = lognormal_pce(kle, basis_in);
  const TripleTensor tensor = triple_products(cfg.n_vars, cfg.p_in, cfg.p_out);

  run.dt = cfg.dt ? *cfg.dt
                  : cfl_timestep(mesh.h, conservative_cmax(coeff.terms[0], cfg.sigma_g), cfg.cfl);
  run.steps = static_cast<int>(std::ceil(cfg.t_final / run.dt - 1e-12));
  for (const auto& p : cfg.probes) run.probe_nodes.push_back(nearest_node(mesh, p[0], p[1]));

  NewmarkParams params;
  params.dt = run.dt;
  SgOptions opt;
  opt.tol = cfg.tol;
  opt.max_iter = cfg.max_iter;
  opt.threads = resolve_threads(cfg.threads);
  opt.probe_nodes = run.probe_nodes;
  opt.store_full = !cfg.snapshot_times.empty();
  const Partition part = partition_structured(mesh, cfg.px, cfg.py);
  SgSolver solver(mesh, part, coeff, tensor, cfg.density, cfg.alpha0, cfg.alpha1, params, opt);
  run.history = solver.run(gaussian_pulse(mesh, 0.7, 0.7, 1.0, 0.01),
                           Eigen::VectorXd::Zero(mesh.n_nodes()), run.steps);
  return run;
}

McRun run_mc_pulse(const RunConfig& cfg, double dt_override) {
  McRun run;
  const Mesh mesh = build_unit_square_mesh(cfg.nx, cfg.ny);
  const KleExpansion kle = kle_exponential(cfg.sigma_g, cfg.bx, cfg.by, cfg.n_vars, mesh, cfg.g0);
  const PceBasis basis_in(cfg.n_vars, cfg.p_in);
  const CoefficientField coeff = lognormal_pce(kle, basis_in);
  run.dt = dt_override > 0.0
               ? dt_override
               : (cfg.dt ? *cfg.dt
                         : cfl_timestep(mesh.h, conservative_cmax(coeff.terms[0], cfg.sigma_g),
                                        cfg.cfl));
  run.steps = static_cast<int>(std::ceil(cfg.t_final / run.dt - 1e-12));
  for (const auto& p : cfg.probes) run.probe_nodes.push_back(nearest_node(mesh, p[0], p[1]));

  const Partition part = partition_structured(mesh, 1, 1);
  const Eigen::VectorXd u0 = gaussian_pulse(mesh, 0.7, 0.7, 1.0, 0.01);
  const Eigen::VectorXd v0 = Eigen::VectorXd::Zero(mesh.n_nodes());
  NewmarkParams params;
  params.dt = run.dt;

  const auto evaluate = [&](const Eigen::VectorXd& xi) -> Eigen::MatrixXd {
    SolveOptions opt;
    opt.threads = 1;
    opt.probe_nodes = run.probe_nodes;
    DetSolver solver(mesh, part, sample_speed_squared(kle, xi), cfg.density, cfg.alpha0,
                     cfg.alpha1, params, opt);
    return solver.run(u0, v0, run.steps).probe_u;
  };
  run.estimate = mc_run(cfg.n_samples, cfg.seed, cfg.n_vars, resolve_threads(cfg.threads),
                        evaluate);
  return run;
}

CalibrationRun run_rayleigh_calibration(int nx, double t_final, double xi_damping, int threads) {
  const Mesh mesh = build_unit_square_mesh(nx, nx);
  const Partition part = partition_structured(mesh, 1, 1);
  NewmarkParams params;
  params.dt = cfl_timestep(mesh.h, 1.0, 0.65);
  SolveOptions opt;
  opt.threads = threads;
  opt.probe_nodes = {nearest_node(mesh, 0.7, 0.7)};
  DetSolver solver(mesh, part, Eigen::VectorXd::Ones(mesh.n_nodes()), 1.0, 0.0, 0.0, params, opt);
  // a broad pulse keeps the response dominated by the two lowest modes
  const int steps = static_cast<int>(std::ceil(t_final / params.dt - 1e-12));
  const TimeHistory hist = solver.run(gaussian_pulse(mesh, 0.7, 0.7, 1.0, 0.1),
                                      Eigen::VectorXd::Zero(mesh.n_nodes()), steps);
  CalibrationRun out;
  out.dt = params.dt;
  out.series = hist.probe_u.row(0);
  auto [p1, p2] = dominant_frequencies(out.series, params.dt);
  if (p1.freq_hz > p2.freq_hz) std::swap(p1, p2);
  out.peak_low = p1;
  out.peak_high = p2;
  const double wi = 2.0 * M_PI * p1.freq_hz, wj = 2.0 * M_PI * p2.freq_hz;
  std::tie(out.alpha0, out.alpha1) = rayleigh_calibrate(wi, wj, xi_damping, xi_damping);
  return out;
}

namespace {

ForceFn bar_tip_force(const Mesh& mesh, double amplitude, double omega) {
  const Index tip = mesh.n_nodes() - 1;
  const Index n_nodes = mesh.n_nodes();
  return [=](double t) {
    Eigen::VectorXd f = Eigen::VectorXd::Zero(n_nodes);
    f[tip] = amplitude * std::sin(omega * t);
    return f;
  };
}

}  // namespace

TimeHistory run_bar_deterministic(const BarModel& model, double t_final, int threads,
                                  double alpha0, double alpha1) {
  const Partition part = partition_structured(model.mesh, 1, 1);
  NewmarkParams params;
  params.dt = model.dt;
  SolveOptions opt;
  opt.threads = threads;
  opt.store_full = true;
  opt.probe_nodes = {model.mesh.n_nodes() - 1};
  const Eigen::VectorXd coeff =
      Eigen::VectorXd::Constant(model.mesh.n_nodes(), model.modulus * model.area);
  DetSolver solver(model.mesh, part, coeff, model.density * model.area, alpha0, alpha1, params,
                   opt);
  const int steps = static_cast<int>(std::ceil(t_final / model.dt - 1e-12));
  return solver.run(Eigen::VectorXd::Zero(model.mesh.n_nodes()),
                    Eigen::VectorXd::Zero(model.mesh.n_nodes()), steps,
                    bar_tip_force(model.mesh, model.force_amplitude, model.force_omega));
}

McEstimate run_bar_mc(const BarModel& model, double t_final,
                      const std::vector<double>& snapshot_times, int n_samples,
                      std::uint64_t seed, int threads, std::vector<Eigen::MatrixXd>* outputs,
                      Eigen::MatrixXd* draws) {
  const Mesh& mesh = model.mesh;
  const Partition part = partition_structured(mesh, 1, 1);
  NewmarkParams params;
  params.dt = model.dt;
  const int steps = static_cast<int>(std::ceil(t_final / model.dt - 1e-12));
  std::vector<int> snap_steps;
  for (double t : snapshot_times) {
    snap_steps.push_back(std::min(steps, static_cast<int>(std::llround(t / model.dt))));
  }
  const double g0 = std::log(model.modulus);
  const ForceFn force = bar_tip_force(mesh, model.force_amplitude, model.force_omega);

  const auto evaluate = [&](const Eigen::VectorXd& xi) -> Eigen::MatrixXd {
    const double modulus = std::exp(g0 + model.sigma_g * xi[0]);
    SolveOptions opt;
    opt.threads = 1;
    opt.store_full = true;
    const Eigen::VectorXd coeff = Eigen::VectorXd::Constant(mesh.n_nodes(), modulus * model.area);
    DetSolver solver(mesh, part, coeff, model.density * model.area, model.alpha0, model.alpha1,
                     params, opt);
    const TimeHistory hist = solver.run(Eigen::VectorXd::Zero(mesh.n_nodes()),
                                        Eigen::VectorXd::Zero(mesh.n_nodes()), steps, force);
    Eigen::MatrixXd out(mesh.n_nodes(), snap_steps.size());
    for (size_t c = 0; c < snap_steps.size(); ++c) {
      out.col(c) = solver.reduction().expand(hist.full_u[snap_steps[c]]);
    }
    return out;
  };

  std::vector<Eigen::MatrixXd> local_outputs;
  Eigen::MatrixXd local_draws;
  McEstimate est = mc_run_storing(n_samples, seed, 1, threads, evaluate,
                                  outputs ? *outputs : local_outputs,
                                  draws ? *draws : local_draws);
  return est;
}

SgHistory run_bar_sg(const BarModel& model, double t_final, int p_in, int p_out, int threads,
                     std::vector<Eigen::VectorXd>* full_states) {
  const Mesh& mesh = model.mesh;
  const Partition part = partition_structured(mesh, 1, 1);
  const KleExpansion kle = kle_single_variable(model.sigma_g, std::log(model.modulus), mesh);
  const PceBasis basis_in(1, p_in);
  CoefficientField coeff = lognormal_pce(kle, basis_in);
  for (auto& term : coeff.terms) term *= model.area;
  const TripleTensor tensor = triple_products(1, p_in, p_out);

  NewmarkParams params;
  params.dt = model.dt;
  SgOptions opt;
  opt.threads = threads;
  opt.store_full = full_states != nullptr;
  opt.probe_nodes = {mesh.n_nodes() - 1};
  SgSolver solver(mesh, part, coeff, tensor, model.density * model.area, model.alpha0,
                  model.alpha1, params, opt);
  const int steps = static_cast<int>(std::ceil(t_final / model.dt - 1e-12));
  SgHistory hist = solver.run(Eigen::VectorXd::Zero(mesh.n_nodes()),
                              Eigen::VectorXd::Zero(mesh.n_nodes()), steps,
                              bar_tip_force(mesh, model.force_amplitude, model.force_omega));
  if (full_states) *full_states = std::move(hist.full_state);
  return hist;
}

Eigen::VectorXd pdf_samples_analytic(double x, double y, double t, double mu_g, double sigma_g,
                                     int n_samples, std::uint64_t seed) {
  if (n_samples < 10000) {
    throw std::invalid_argument("pdf_samples_analytic: at least 1e4 samples required");
  }
  NormalSampler sampler(seed);
  Eigen::VectorXd samples(n_samples);
  for (int m = 0; m < n_samples; ++m) {
    const double speed = std::exp(mu_g + sigma_g * sampler.normal());
    samples[m] = analytic_solution_2d(x, y, t, 2, 1, speed);
  }
  return samples;
}

}  // namespace sgwave

// ---------------------------------------------------------------------------
// CLI drivers
// ---------------------------------------------------------------------------

namespace sgwave {

namespace {

namespace fs = std::filesystem;

std::string join(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

void write_probe_series(const std::string& path, const TimeHistory& hist, int probe) {
  CsvWriter csv("t,u,v,a");
  for (size_t s = 0; s < hist.times.size(); ++s) {
    csv.add_row({hist.times[s], hist.probe_u(probe, s), hist.probe_v(probe, s),
                 hist.probe_a(probe, s)});
  }
  csv.write(path);
}

void write_iterations(const std::string& path, const std::vector<PcgReport>& reports) {
  CsvWriter csv("step,iterations,final_residual");
  for (size_t s = 0; s < reports.size(); ++s) {
    csv.add_row({static_cast<double>(s + 1), static_cast<double>(reports[s].iterations),
                 reports[s].residual_history.empty() ? 0.0
                                                     : reports[s].residual_history.back()});
  }
  csv.write(path);
}

struct DriverContext {
  const RunConfig& cfg;
  std::string dir;
  DriverResult result;

  void emit(const std::string& name, const std::string& content) {
    write_text_file(join(dir, name), content);
    result.outputs.push_back(name);
  }
  void emit_csv(const std::string& name, const CsvWriter& csv) { emit(name, csv.str()); }
  void note(const std::string& name) { result.outputs.push_back(name); }
};

void driver_solve_det(DriverContext& ctx) {
  const RunConfig& cfg = ctx.cfg;
  const Mesh mesh = build_unit_square_mesh(cfg.nx, cfg.ny);
  const Partition part = partition_structured(mesh, cfg.px, cfg.py);
  const double speed_sq = std::exp(cfg.g0);
  NewmarkParams params;
  params.dt = cfg.dt ? *cfg.dt : cfl_timestep(mesh.h, std::sqrt(speed_sq), cfg.cfl);
  SolveOptions opt;
  opt.precond = precond_from_string(cfg.preconditioner);
  opt.tol = cfg.tol;
  opt.max_iter = cfg.max_iter;
  opt.threads = resolve_threads(cfg.threads);
  for (const auto& p : cfg.probes) opt.probe_nodes.push_back(nearest_node(mesh, p[0], p[1]));
  DetSolver solver(mesh, part, Eigen::VectorXd::Constant(mesh.n_nodes(), speed_sq), cfg.density,
                   cfg.alpha0, cfg.alpha1, params, opt);
  const int steps = static_cast<int>(std::ceil(cfg.t_final / params.dt - 1e-12));
  const TimeHistory hist = solver.run(gaussian_pulse(mesh, 0.7, 0.7, 1.0, 0.01),
                                      Eigen::VectorXd::Zero(mesh.n_nodes()), steps);
  for (size_t p = 0; p < opt.probe_nodes.size(); ++p) {
    const std::string name = "probe_" + std::to_string(p) + ".csv";
    write_probe_series(join(ctx.dir, name), hist, static_cast<int>(p));
    ctx.note(name);
  }
  if (!hist.reports.empty()) {
    write_iterations(join(ctx.dir, "iterations.csv"), hist.reports);
    ctx.note("iterations.csv");
  }
  ctx.emit("mesh_summary.json", mesh_summary_json(mesh) + "\n");
  ctx.emit("partition.csv", partition_csv(mesh, part));
}

void driver_solve_sg(DriverContext& ctx) {
  const RunConfig& cfg = ctx.cfg;
  const SgRun run = run_sg_pulse(cfg);
  const SgHistory& hist = run.history;
  const int n_terms = static_cast<int>(hist.probe_coeffs.empty() ? 0 : hist.probe_coeffs[0].rows());
  for (size_t p = 0; p < run.probe_nodes.size(); ++p) {
    std::string header = "t,mean,std";
    for (int j = 0; j < n_terms; ++j) header += ",u" + std::to_string(j);
    CsvWriter csv(header);
    for (size_t s = 0; s < hist.times.size(); ++s) {
      std::vector<double> row{hist.times[s], hist.probe_mean(p, s), hist.probe_std(p, s)};
      for (int j = 0; j < n_terms; ++j) row.push_back(hist.probe_coeffs[p](j, s));
      csv.add_row(row);
    }
    const std::string name = "probe_" + std::to_string(p) + ".csv";
    ctx.emit_csv(name, csv);
  }
  ctx.emit("kle_spectrum.csv",
           kle_spectrum_csv(kle_exponential(cfg.sigma_g, cfg.bx, cfg.by, cfg.n_vars, run.mesh,
                                            cfg.g0)));
  ctx.emit("pce_indices.csv", PceBasis(cfg.n_vars, cfg.p_out).indices_csv());
  if (!hist.reports.empty()) {
    write_iterations(join(ctx.dir, "iterations.csv"), hist.reports);
    ctx.note("iterations.csv");
  }
  if (!cfg.snapshot_times.empty() && !hist.full_state.empty()) {
    const DirichletReduction red = make_dirichlet_reduction(run.mesh);
    for (size_t k = 0; k < cfg.snapshot_times.size(); ++k) {
      const int step = std::min<int>(static_cast<int>(hist.full_state.size()) - 1,
                                     static_cast<int>(std::llround(cfg.snapshot_times[k] / run.dt)));
      Eigen::VectorXd mean, sd;
      moments(hist.full_state[step], red.n_dofs(), mean, sd);
      const Eigen::VectorXd mean_n = red.expand(mean), sd_n = red.expand(sd);
      CsvWriter csv("node_id,x,y,mean,std");
      for (Index i = 0; i < run.mesh.n_nodes(); ++i) {
        csv.add_row({static_cast<double>(i), run.mesh.nodes(i, 0), run.mesh.nodes(i, 1),
                     mean_n[i], sd_n[i]});
      }
      ctx.emit_csv("snapshot_" + std::to_string(k) + ".csv", csv);
    }
  }
  // probe statistics plot
  std::vector<PlotSeries> series;
  for (size_t p = 0; p < run.probe_nodes.size(); ++p) {
    PlotSeries sm{"mean p" + std::to_string(p), hist.times, {}};
    PlotSeries ss{"std p" + std::to_string(p), hist.times, {}};
    for (size_t s = 0; s < hist.times.size(); ++s) {
      sm.y.push_back(hist.probe_mean(p, s));
      ss.y.push_back(hist.probe_std(p, s));
    }
    series.push_back(std::move(sm));
    series.push_back(std::move(ss));
  }
  write_svg_lines(join(ctx.dir, "probes.svg"), "SG pressure statistics", "t (s)", "pressure",
                  series);
  ctx.note("probes.svg");
}

void driver_mc(DriverContext& ctx) {
  const McRun run = run_mc_pulse(ctx.cfg);
  for (size_t p = 0; p < run.probe_nodes.size(); ++p) {
    CsvWriter csv("t,mean,std,stderr");
    for (int s = 0; s <= run.steps; ++s) {
      csv.add_row({s * run.dt, run.estimate.mean(p, s), run.estimate.std_dev(p, s),
                   run.estimate.standard_error(p, s)});
    }
    ctx.emit_csv("mc_probe_" + std::to_string(p) + ".csv", csv);
  }
}

void driver_compare_preconditioners(DriverContext& ctx) {
  const RunConfig& cfg = ctx.cfg;
  const std::vector<std::pair<int, int>> partitions{{2, 2}, {4, 2}, {4, 4}};
  const double dt = cfg.dt ? *cfg.dt : 0.01;
  const PrecondComparison cmp =
      run_precond_comparison(cfg.nx, dt, cfg.t_final, partitions, resolve_threads(cfg.threads),
                             cfg.tol, cfg.max_iter);
  CsvWriter csv("subdomains,lumped,nn1,nn2");
  std::vector<PlotSeries> series;
  for (const char* name : {"lumped", "nn1", "nn2"}) {
    PlotSeries s{name, {}, {}};
    for (size_t i = 0; i < cmp.subdomain_counts.size(); ++i) {
      s.x.push_back(cmp.subdomain_counts[i]);
      s.y.push_back(cmp.mean_iterations.at(name)[i]);
    }
    series.push_back(std::move(s));
  }
  for (size_t i = 0; i < cmp.subdomain_counts.size(); ++i) {
    csv.add_row({static_cast<double>(cmp.subdomain_counts[i]), cmp.mean_iterations.at("lumped")[i],
                 cmp.mean_iterations.at("nn1")[i], cmp.mean_iterations.at("nn2")[i]});
  }
  ctx.emit_csv("iterations_vs_subdomains.csv", csv);
  write_svg_lines(join(ctx.dir, "iterations_vs_subdomains.svg"),
                  "Mean PCG iterations vs subdomain count", "subdomains", "mean iterations",
                  series);
  ctx.note("iterations_vs_subdomains.svg");
}

void driver_verify_analytic(DriverContext& ctx) {
  const RunConfig& cfg = ctx.cfg;
  const AnalyticRun run = run_analytic_verification(
      cfg.nx, cfg.dt ? *cfg.dt : cfg.cfl, cfg.dt.has_value(), cfg.t_final, 2, 1,
      resolve_threads(cfg.threads));
  CsvWriter csv("t,rel_error,abs_error");
  PlotSeries rel{"relative error", {}, {}};
  for (size_t s = 0; s < run.curve.times.size(); ++s) {
    csv.add_row({run.curve.times[s], run.curve.rel_error[s], run.curve.abs_error[s]});
    if (std::isfinite(run.curve.rel_error[s])) {
      rel.x.push_back(run.curve.times[s]);
      rel.y.push_back(run.curve.rel_error[s]);
    }
  }
  ctx.emit_csv("error.csv", csv);
  write_svg_lines(join(ctx.dir, "error.svg"), "Relative error vs analytic solution", "t (s)",
                  "e(t)", {rel}, false, true);
  ctx.note("error.svg");
}

void driver_cfl_study(DriverContext& ctx) {
  const RunConfig& cfg = ctx.cfg;
  const std::vector<int> meshes{cfg.nx / 2, cfg.nx};
  const std::vector<double> cfls{1.0, 0.65, 0.25};
  CsvWriter summary("nx,cfl,max_rel_error");
  for (int nx : meshes) {
    std::vector<PlotSeries> series;
    for (double cfl : cfls) {
      const AnalyticRun run =
          run_analytic_verification(nx, cfl, false, cfg.t_final, 2, 1,
                                    resolve_threads(cfg.threads));
      summary.add_row({static_cast<double>(nx), cfl, run.curve.max_rel});
      CsvWriter csv("t,rel_error,abs_error");
      PlotSeries s{"CFL " + std::to_string(cfl).substr(0, 4), {}, {}};
      for (size_t k = 0; k < run.curve.times.size(); ++k) {
        csv.add_row({run.curve.times[k], run.curve.rel_error[k], run.curve.abs_error[k]});
        if (std::isfinite(run.curve.rel_error[k])) {
          s.x.push_back(run.curve.times[k]);
          s.y.push_back(run.curve.rel_error[k]);
        }
      }
      series.push_back(std::move(s));
      char name[64];
      std::snprintf(name, sizeof(name), "error_nx%d_cfl%.2f.csv", nx, cfl);
      ctx.emit_csv(name, csv);
    }
    const std::string svg = "error_nx" + std::to_string(nx) + ".svg";
    write_svg_lines(join(ctx.dir, svg), "Relative error, nx=" + std::to_string(nx), "t (s)",
                    "e(t)", series, false, true);
    ctx.note(svg);
  }
  ctx.emit_csv("summary.csv", summary);
}

void driver_pdf(DriverContext& ctx) {
  const RunConfig& cfg = ctx.cfg;
  const bool custom = cfg.probes_explicit && !cfg.probes.empty();
  const double x = custom ? cfg.probes[0][0] : 0.25;
  const double y = custom ? cfg.probes[0][1] : 0.5;
  // density estimation needs far more draws than the solver-facing default
  const int n_samples = cfg.n_samples >= 10000 ? cfg.n_samples : 100000;
  std::vector<double> times = cfg.snapshot_times;
  if (times.empty()) times = {0.1, 0.5, 1.0, 2.0};
  CsvWriter peaks("t,peaks,bins");
  for (size_t k = 0; k < times.size(); ++k) {
    const Eigen::VectorXd samples =
        pdf_samples_analytic(x, y, times[k], cfg.g0, cfg.sigma_g, n_samples, cfg.seed);
    const Histogram h = histogram(samples, 100);
    CsvWriter csv("bin_center,density");
    for (Eigen::Index b = 0; b < h.centers.size(); ++b) {
      csv.add_row({h.centers[b], h.density[b]});
    }
    ctx.emit_csv("pdf_t" + std::to_string(k) + ".csv", csv);
    peaks.add_row({times[k], static_cast<double>(count_peaks_smoothed(h.density)),
                   static_cast<double>(h.centers.size())});
  }
  ctx.emit_csv("peaks.csv", peaks);
}

void driver_rayleigh_calibrate(DriverContext& ctx) {
  const RunConfig& cfg = ctx.cfg;
  const CalibrationRun run =
      run_rayleigh_calibration(cfg.nx, cfg.t_final < 10.0 ? 10.0 : cfg.t_final, 0.1,
                               resolve_threads(cfg.threads));
  const Eigen::VectorXd mag = magnitude_spectrum(run.series, run.dt);
  CsvWriter csv("f_hz,magnitude");
  const double df = 1.0 / (static_cast<double>(run.series.size()) * run.dt);
  for (Eigen::Index k = 0; k < mag.size(); ++k) csv.add_row({k * df, mag[k]});
  ctx.emit_csv("spectrum.csv", csv);
  CsvWriter out("f1_hz,f2_hz,alpha0,alpha1");
  out.add_row({run.peak_low.freq_hz, run.peak_high.freq_hz, run.alpha0, run.alpha1});
  ctx.emit_csv("calibration.csv", out);
  PlotSeries s{"magnitude", {}, {}};
  for (Eigen::Index k = 1; k < mag.size(); ++k) {
    s.x.push_back(k * df);
    s.y.push_back(mag[k]);
  }
  write_svg_lines(join(ctx.dir, "spectrum.svg"), "Response spectrum at (0.7, 0.7)", "f (Hz)",
                  "magnitude", {s});
  ctx.note("spectrum.svg");
}

void driver_nisp(DriverContext& ctx) {
  const RunConfig& cfg = ctx.cfg;
  BarModel model;
  model.mesh = build_interval_mesh(cfg.bar_n, cfg.bar_length);
  model.sigma_g = cfg.sigma_g;
  const double t_final = cfg.t_final;
  const int p_in = 7, p_out = 10;

  std::vector<Eigen::MatrixXd> outputs;
  Eigen::MatrixXd draws;
  run_bar_mc(model, t_final, {t_final}, cfg.n_samples, cfg.seed, resolve_threads(cfg.threads),
             &outputs, &draws);
  const PceBasis basis_out(1, p_out);
  const std::vector<Eigen::MatrixXd> nisp = nisp_project(outputs, draws, basis_out);

  std::vector<Eigen::VectorXd> sg_states;
  run_bar_sg(model, t_final, p_in, p_out, resolve_threads(cfg.threads), &sg_states);
  const DirichletReduction red = make_dirichlet_reduction(model.mesh);
  const Eigen::VectorXd& final_state = sg_states.back();

  CsvWriter csv("term,sg_norm,nisp_norm");
  for (int j = 0; j < basis_out.size(); ++j) {
    const Eigen::VectorXd sg_j = final_state.segment(j * red.n_dofs(), red.n_dofs());
    csv.add_row({static_cast<double>(j), sg_j.norm(), nisp[j].col(0).norm()});
  }
  ctx.emit_csv("pce_coefficients.csv", csv);
}

void driver_bar1d(DriverContext& ctx) {
  const RunConfig& cfg = ctx.cfg;
  BarModel model;
  model.mesh = build_interval_mesh(cfg.bar_n, cfg.bar_length);
  model.sigma_g = cfg.sigma_g;
  const int threads = resolve_threads(cfg.threads);

  // deterministic snapshots
  const TimeHistory det = run_bar_deterministic(model, 2.0, threads, model.alpha0, model.alpha1);
  const DirichletReduction red = make_dirichlet_reduction(model.mesh);
  const std::vector<double> snap_times{0.5, 1.0, 2.0};
  {
    CsvWriter csv("x,u_t0.5,u_t1,u_t2");
    std::vector<int> steps;
    for (double t : snap_times) {
      steps.push_back(std::min<int>(static_cast<int>(det.full_u.size()) - 1,
                                    static_cast<int>(std::llround(t / model.dt))));
    }
    for (Index i = 0; i < model.mesh.n_nodes(); ++i) {
      std::vector<double> row{model.mesh.nodes(i, 0)};
      for (int s : steps) row.push_back(red.expand(det.full_u[s])[i]);
      csv.add_row(row);
    }
    ctx.emit_csv("bar_snapshots.csv", csv);
  }

  // steady state with higher damping
  const TimeHistory steady = run_bar_deterministic(model, 10.0, threads, 10 * model.alpha0,
                                                   10 * model.alpha1);
  {
    CsvWriter csv("t,u_tip");
    for (size_t s = 0; s < steady.times.size(); ++s) {
      csv.add_row({steady.times[s], steady.probe_u(0, s)});
    }
    ctx.emit_csv("bar_steady_state.csv", csv);
  }

  // MC vs SG vs NISP statistics along the bar at t = 1
  std::vector<Eigen::MatrixXd> outputs;
  Eigen::MatrixXd draws;
  const McEstimate mc = run_bar_mc(model, 1.0, {1.0}, cfg.n_samples, cfg.seed, threads, &outputs,
                                   &draws);
  const PceBasis basis_out(1, 10);
  const std::vector<Eigen::MatrixXd> nisp = nisp_project(outputs, draws, basis_out);
  std::vector<Eigen::VectorXd> sg_states;
  run_bar_sg(model, 1.0, 7, 10, threads, &sg_states);
  Eigen::VectorXd sg_mean, sg_std;
  moments(sg_states.back(), red.n_dofs(), sg_mean, sg_std);
  Eigen::VectorXd nisp_var = Eigen::VectorXd::Zero(model.mesh.n_nodes());
  for (int j = 1; j < basis_out.size(); ++j) {
    nisp_var.array() += nisp[j].col(0).array().square();
  }
  {
    CsvWriter csv("x,mc_mean,mc_std,sg_mean,sg_std,nisp_mean,nisp_std");
    const Eigen::VectorXd sg_mean_n = red.expand(sg_mean), sg_std_n = red.expand(sg_std);
    for (Index i = 0; i < model.mesh.n_nodes(); ++i) {
      csv.add_row({model.mesh.nodes(i, 0), mc.mean(i, 0), mc.std_dev(i, 0), sg_mean_n[i],
                   sg_std_n[i], nisp[0](i, 0), std::sqrt(nisp_var[i])});
    }
    ctx.emit_csv("bar_statistics_t1.csv", csv);
  }

  // standard error vs sample count at the tip
  {
    CsvWriter csv("samples,standard_error");
    PlotSeries s{"stderr(tip, t=1)", {}, {}};
    for (int m : {250, 1000, 4000}) {
      const McEstimate est = run_bar_mc(model, 1.0, {1.0}, m, cfg.seed + m, threads, nullptr,
                                        nullptr);
      const double se = est.standard_error(model.mesh.n_nodes() - 1, 0);
      csv.add_row({static_cast<double>(m), se});
      s.x.push_back(m);
      s.y.push_back(se);
    }
    ctx.emit_csv("bar_standard_error.csv", csv);
    write_svg_lines(join(ctx.dir, "bar_standard_error.svg"), "MC standard error vs samples",
                    "samples", "standard error", {s}, true, true);
    ctx.note("bar_standard_error.svg");
  }
}

using DriverFn = void (*)(DriverContext&);

const std::map<std::string, DriverFn>& driver_table() {
  static const std::map<std::string, DriverFn> table{
      {"solve-det", driver_solve_det},
      {"solve-sg", driver_solve_sg},
      {"mc", driver_mc},
      {"nisp", driver_nisp},
      {"compare-preconditioners", driver_compare_preconditioners},
      {"verify-analytic", driver_verify_analytic},
      {"cfl-study", driver_cfl_study},
      {"pdf", driver_pdf},
      {"rayleigh-calibrate", driver_rayleigh_calibrate},
      {"bar1d", driver_bar1d},
  };
  return table;
}

}  // namespace

const std::vector<std::string>& driver_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [name, fn] : driver_table()) out.push_back(name);
    return out;
  }();
  return names;
}

DriverResult run_driver(const std::string& command, const RunConfig& cfg,
                        const std::string& out_dir) {
  const auto it = driver_table().find(command);
  if (it == driver_table().end()) {
    throw std::invalid_argument("unknown subcommand: " + command);
  }
  if (!cfg.experiment.empty() && cfg.experiment != command) {
    throw std::invalid_argument("config experiment '" + cfg.experiment +
                                "' does not match subcommand '" + command + "'");
  }
  const auto start = std::chrono::steady_clock::now();
  ensure_directory(out_dir);
  DriverContext ctx{cfg, out_dir, {}};
  it->second(ctx);

  Manifest manifest;
  manifest.command = command;
  manifest.config_echo = config_json(cfg);
  manifest.seed = cfg.seed;
  manifest.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  manifest.outputs = ctx.result.outputs;
  manifest.write(join(out_dir, "manifest.json"));
  ctx.result.outputs.push_back("manifest.json");
  return ctx.result;
}

}  // namespace sgwave
