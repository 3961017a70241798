#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "sgwave/config.hpp"
#include "sgwave/experiments.hpp"
#include "sgwave/io.hpp"

using namespace sgwave;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("config parsing defaults and overrides") {
  const RunConfig def = parse_config("{}");
  CHECK(def.cfl == doctest::Approx(0.65));
  CHECK(def.sigma_g == doctest::Approx(0.1));
  CHECK(def.n_vars == 3);
  CHECK(def.p_in == 2);
  CHECK(def.p_out == 3);
  CHECK(def.tol == doctest::Approx(1e-8));
  CHECK(def.n_samples == 2000);

  const RunConfig cfg = parse_config(R"({
    "mesh": {"nx": 16, "ny": 12},
    "partition": {"px": 4, "py": 2},
    "physics": {"sigma_g": 0.2, "dt": 0.004, "t_final": 0.25},
    "stochastic": {"n_vars": 2, "p_in": 1, "p_out": 2},
    "solver": {"tol": 1e-10, "preconditioner": "nn1"},
    "sampling": {"n_samples": 64, "seed": 5},
    "probes": [[0.25, 0.5]],
    "threads": 2
  })");
  CHECK(cfg.nx == 16);
  CHECK(cfg.ny == 12);
  CHECK(cfg.px == 4);
  CHECK(*cfg.dt == doctest::Approx(0.004));
  CHECK(cfg.preconditioner == "nn1");
  CHECK(cfg.probes.size() == 1);
}

TEST_CASE("config rejects unknown keys and bad values") {
  CHECK_THROWS(parse_config(R"({"meshh": {}})"));
  CHECK_THROWS(parse_config(R"({"mesh": {"nx": 8, "bogus": 1}})"));
  CHECK_THROWS(parse_config(R"({"solver": {"preconditioner": "jacobi"}})"));
  CHECK_THROWS(parse_config(R"({"stochastic": {"p_in": 3, "p_out": 2}})"));
  CHECK_THROWS(parse_config("not json"));
}

TEST_CASE("config json round trip") {
  RunConfig cfg;
  cfg.nx = 20;
  cfg.dt = 0.01;
  const RunConfig back = parse_config(config_json(cfg));
  CHECK(back.nx == 20);
  CHECK(*back.dt == doctest::Approx(0.01));
  CHECK(back.preconditioner == cfg.preconditioner);
}

TEST_CASE("csv writer is byte stable") {
  CsvWriter a("x,y"), b("x,y");
  for (int i = 0; i < 10; ++i) {
    a.add_row({i * 0.1, std::sin(i * 0.1)});
    b.add_row({i * 0.1, std::sin(i * 0.1)});
  }
  CHECK(a.str() == b.str());
  CHECK(a.str().find("x,y\n") == 0);
}

TEST_CASE("driver outputs are byte-identical across reruns") {
  RunConfig cfg;
  cfg.nx = 8;
  cfg.ny = 8;
  cfg.px = 2;
  cfg.py = 2;
  cfg.t_final = 0.1;
  cfg.n_samples = 16;
  cfg.threads = 2;

  TempDir d1("sgwave_repro_1"), d2("sgwave_repro_2");
  const DriverResult r1 = run_driver("solve-det", cfg, d1.path.string());
  const DriverResult r2 = run_driver("solve-det", cfg, d2.path.string());
  REQUIRE(r1.outputs == r2.outputs);
  for (const std::string& name : r1.outputs) {
    if (name.size() >= 4 && name.substr(name.size() - 4) == ".csv") {
      CHECK(slurp(d1.path / name) == slurp(d2.path / name));
    }
  }
}

TEST_CASE("every output is referenced by the manifest") {
  RunConfig cfg;
  cfg.nx = 8;
  cfg.ny = 8;
  cfg.px = 2;
  cfg.py = 2;
  cfg.t_final = 0.05;
  cfg.threads = 1;
  TempDir dir("sgwave_manifest");
  const DriverResult res = run_driver("solve-det", cfg, dir.path.string());
  const std::string manifest = slurp(dir.path / "manifest.json");
  for (const auto& entry : fs::directory_iterator(dir.path)) {
    const std::string name = entry.path().filename().string();
    if (name == "manifest.json") continue;
    CHECK(manifest.find("\"" + name + "\"") != std::string::npos);
  }
}

TEST_CASE("unknown subcommand and mismatched experiment tag fail") {
  RunConfig cfg;
  TempDir dir("sgwave_badcmd");
  CHECK_THROWS(run_driver("no-such-driver", cfg, dir.path.string()));
  cfg.experiment = "mc";
  CHECK_THROWS(run_driver("solve-det", cfg, dir.path.string()));
}

TEST_CASE("svg plot writer emits polylines") {
  TempDir dir("sgwave_svg");
  PlotSeries s{"demo", {0, 1, 2}, {1.0, 0.5, 2.0}};
  const std::string path = (dir.path / "plot.svg").string();
  write_svg_lines(path, "demo", "x", "y", {s});
  const std::string svg = slurp(path);
  CHECK(svg.find("<svg") == 0);
  CHECK(svg.find("polyline") != std::string::npos);
}
