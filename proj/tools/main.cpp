#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <string>

#include "sgwave/config.hpp"
#include "sgwave/experiments.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Stochastic Galerkin acoustic wave solver with Neumann-Neumann DD"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  int threads = -1;
  std::uint64_t seed = 0;
  bool seed_set = false;

  for (const std::string& name : sgwave::driver_names()) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "JSON run configuration");
    sub->add_option("--out", out_dir, "output directory (overrides config)");
    sub->add_option("--threads", threads, "worker threads (0 = all cores)");
    sub->add_option("--seed", seed, "RNG seed override")->each([&](const std::string&) {
      seed_set = true;
    });
  }

  CLI11_PARSE(app, argc, argv);
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    sgwave::RunConfig cfg;
    if (!config_path.empty()) cfg = sgwave::load_config(config_path);
    if (threads >= 0) cfg.threads = threads;
    if (seed_set) cfg.seed = seed;
    const std::string dir = out_dir.empty() ? cfg.output_dir : out_dir;
    const sgwave::DriverResult result = sgwave::run_driver(command, cfg, dir);
    nlohmann::json ok{{"status", "ok"}, {"command", command}, {"outputs", result.outputs}};
    std::printf("%s\n", ok.dump(2).c_str());
    return 0;
  } catch (const std::exception& e) {
    nlohmann::json err{{"status", "error"}, {"command", command}, {"message", e.what()}};
    std::fprintf(stderr, "%s\n", err.dump(2).c_str());
    return 1;
  }
}
