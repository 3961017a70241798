#include "sgwave/config.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace sgwave {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& allowed,
                    const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key())) {
      throw std::invalid_argument("config: unknown key '" + it.key() + "' in " + where);
    }
  }
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
  json root = json::parse(json_text);
  if (!root.is_object()) throw std::invalid_argument("config: top level must be an object");
  reject_unknown(root,
                 {"experiment", "mesh", "partition", "physics", "stochastic", "solver",
                  "sampling", "probes", "snapshot_times", "output_dir", "threads"},
                 "top level");
  RunConfig cfg;
  if (root.contains("experiment")) cfg.experiment = root["experiment"].get<std::string>();
  if (root.contains("mesh")) {
    const json& m = root["mesh"];
    reject_unknown(m, {"nx", "ny", "n", "length"}, "mesh");
    if (m.contains("nx")) cfg.nx = m["nx"].get<int>();
    if (m.contains("ny")) cfg.ny = m["ny"].get<int>();
    if (m.contains("n")) cfg.bar_n = m["n"].get<int>();
    if (m.contains("length")) cfg.bar_length = m["length"].get<double>();
  }
  if (root.contains("partition")) {
    const json& p = root["partition"];
    reject_unknown(p, {"px", "py"}, "partition");
    if (p.contains("px")) cfg.px = p["px"].get<int>();
    if (p.contains("py")) cfg.py = p["py"].get<int>();
  }
  if (root.contains("physics")) {
    const json& p = root["physics"];
    reject_unknown(p,
                   {"sigma_g", "bx", "by", "g0", "alpha0", "alpha1", "cfl", "dt", "t_final",
                    "density"},
                   "physics");
    if (p.contains("sigma_g")) cfg.sigma_g = p["sigma_g"].get<double>();
    if (p.contains("bx")) cfg.bx = p["bx"].get<double>();
    if (p.contains("by")) cfg.by = p["by"].get<double>();
    if (p.contains("g0")) cfg.g0 = p["g0"].get<double>();
    if (p.contains("alpha0")) cfg.alpha0 = p["alpha0"].get<double>();
    if (p.contains("alpha1")) cfg.alpha1 = p["alpha1"].get<double>();
    if (p.contains("cfl")) cfg.cfl = p["cfl"].get<double>();
    if (p.contains("dt")) cfg.dt = p["dt"].get<double>();
    if (p.contains("t_final")) cfg.t_final = p["t_final"].get<double>();
    if (p.contains("density")) cfg.density = p["density"].get<double>();
  }
  if (root.contains("stochastic")) {
    const json& s = root["stochastic"];
    reject_unknown(s, {"n_vars", "p_in", "p_out"}, "stochastic");
    if (s.contains("n_vars")) cfg.n_vars = s["n_vars"].get<int>();
    if (s.contains("p_in")) cfg.p_in = s["p_in"].get<int>();
    if (s.contains("p_out")) cfg.p_out = s["p_out"].get<int>();
  }
  if (root.contains("solver")) {
    const json& s = root["solver"];
    reject_unknown(s, {"tol", "max_iter", "preconditioner"}, "solver");
    if (s.contains("tol")) cfg.tol = s["tol"].get<double>();
    if (s.contains("max_iter")) cfg.max_iter = s["max_iter"].get<int>();
    if (s.contains("preconditioner")) cfg.preconditioner = s["preconditioner"].get<std::string>();
  }
  if (root.contains("sampling")) {
    const json& s = root["sampling"];
    reject_unknown(s, {"n_samples", "seed"}, "sampling");
    if (s.contains("n_samples")) cfg.n_samples = s["n_samples"].get<int>();
    if (s.contains("seed")) cfg.seed = s["seed"].get<std::uint64_t>();
  }
  if (root.contains("probes")) {
    cfg.probes.clear();
    cfg.probes_explicit = true;
    for (const json& p : root["probes"]) {
      if (p.is_array() && p.size() == 2) {
        cfg.probes.push_back({p[0].get<double>(), p[1].get<double>()});
      } else if (p.is_number()) {
        cfg.probes.push_back({p.get<double>(), 0.0});
      } else {
        throw std::invalid_argument("config: probes must be [x, y] pairs or scalars");
      }
    }
  }
  if (root.contains("snapshot_times")) {
    cfg.snapshot_times = root["snapshot_times"].get<std::vector<double>>();
  }
  if (root.contains("output_dir")) cfg.output_dir = root["output_dir"].get<std::string>();
  if (root.contains("threads")) cfg.threads = root["threads"].get<int>();

  if (cfg.tol <= 0.0 || cfg.max_iter < 1) throw std::invalid_argument("config: bad solver block");
  if (cfg.cfl <= 0.0 || cfg.t_final <= 0.0) throw std::invalid_argument("config: bad physics block");
  if (cfg.preconditioner != "lumped" && cfg.preconditioner != "nn1" &&
      cfg.preconditioner != "nn2") {
    throw std::invalid_argument("config: preconditioner must be lumped, nn1 or nn2");
  }
  if (cfg.n_vars < 1 || cfg.p_in < 0 || cfg.p_out < cfg.p_in) {
    throw std::invalid_argument("config: bad stochastic block");
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string config_json(const RunConfig& c) {
  json j;
  if (!c.experiment.empty()) j["experiment"] = c.experiment;
  j["mesh"] = {{"nx", c.nx}, {"ny", c.ny}, {"n", c.bar_n}, {"length", c.bar_length}};
  j["partition"] = {{"px", c.px}, {"py", c.py}};
  j["physics"] = {{"sigma_g", c.sigma_g}, {"bx", c.bx},         {"by", c.by},
                  {"g0", c.g0},           {"alpha0", c.alpha0}, {"alpha1", c.alpha1},
                  {"cfl", c.cfl},         {"t_final", c.t_final}, {"density", c.density}};
  if (c.dt) j["physics"]["dt"] = *c.dt;
  j["stochastic"] = {{"n_vars", c.n_vars}, {"p_in", c.p_in}, {"p_out", c.p_out}};
  j["solver"] = {{"tol", c.tol}, {"max_iter", c.max_iter}, {"preconditioner", c.preconditioner}};
  j["sampling"] = {{"n_samples", c.n_samples}, {"seed", c.seed}};
  j["probes"] = json::array();
  for (const auto& p : c.probes) j["probes"].push_back({p[0], p[1]});
  if (!c.snapshot_times.empty()) j["snapshot_times"] = c.snapshot_times;
  j["output_dir"] = c.output_dir;
  j["threads"] = c.threads;
  return j.dump(2);
}

}  // namespace sgwave
