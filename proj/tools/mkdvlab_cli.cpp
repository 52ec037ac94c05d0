// mkdvlab run <config.json> [--workers K] [--out DIR] [--seed S]
//
// Exit codes: 0 all checks passed, 1 a threshold check failed, 2 configuration error.
// Outputs go to <out>/<experiment>_<UTC timestamp>_seed<S>/: config.json (resolved),
// results.json, results.csv and run.json (timestamp, wall clock, workers).

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "mkdvlab/config.hpp"
#include "mkdvlab/experiments.hpp"

namespace fs = std::filesystem;
using namespace mkdvlab;

namespace {

std::string utc_stamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%SZ", &tm);
  return buf;
}

fs::path fresh_directory(const fs::path& root, const std::string& base) {
  fs::create_directories(root);
  fs::path dir = root / base;
  for (int k = 1; fs::exists(dir); ++k) dir = root / (base + "-" + std::to_string(k));
  fs::create_directory(dir);
  return dir;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + p.string());
}

int run(const std::string& config_path, std::optional<int> workers, std::optional<std::string> out,
        std::optional<std::uint64_t> seed) {
  RunConfig cfg;
  try {
    cfg = load_run_config(config_path);
    if (workers) {
      if (*workers < 1) throw config_error("--workers must be >= 1");
      cfg.workers = *workers;
    }
    if (out) cfg.out = *out;
    if (seed) cfg.seed = *seed;
  } catch (const config_error& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  }

  fs::path root = cfg.out;
  if (root.empty()) {
    const char* env = std::getenv("MKDVLAB_OUT");
    root = env && *env ? fs::path(env) : fs::path("runs");
  }
  const std::string stamp = utc_stamp();

  ExperimentResult result;
  try {
    result = run_experiment(cfg);
  } catch (const config_error& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "experiment " << cfg.experiment << " aborted: " << e.what() << '\n';
    return 1;
  }

  const fs::path dir = fresh_directory(root, cfg.experiment + "_" + stamp + "_seed" + std::to_string(cfg.seed));
  write_file(dir / "config.json", cfg.resolved().dump(2) + "\n");
  write_file(dir / "results.json", result.to_json().dump(2) + "\n");
  write_file(dir / "results.csv", result.to_csv());
  nlohmann::ordered_json run_info;
  run_info["timestamp"] = stamp;
  run_info["wall_clock_seconds"] = result.wall_clock;
  run_info["workers"] = cfg.workers;
  run_info["passed"] = result.passed();
  write_file(dir / "run.json", run_info.dump(2) + "\n");

  for (const auto& s : result.scalars) {
    std::cout << s.name << " = " << format_number(s.value);
    if (!s.exact) std::cout << " +- " << format_number(s.stderr_);
    std::cout << '\n';
  }
  for (const auto& f : result.failures)
    std::cerr << "sample " << f.index << " excluded: " << f.message << '\n';
  for (const auto& c : result.checks) {
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.name;
    if (!c.detail.empty()) std::cout << " (" << c.detail << ")";
    std::cout << '\n';
    if (!c.passed) std::cerr << "threshold failure: " << c.name << " " << c.detail << '\n';
  }
  std::cout << "output: " << dir.string() << '\n';
  return result.passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Truncated mKdV flows, Gaussian measures and invariance experiments"};
  app.require_subcommand(1);
  auto* cmd = app.add_subcommand("run", "run the experiment described by a JSON config");
  std::string config_path;
  std::optional<int> workers;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  cmd->add_option("config", config_path, "configuration file")->required();
  cmd->add_option("--workers", workers, "worker threads (overrides config)");
  cmd->add_option("--out", out, "output root directory (overrides config and MKDVLAB_OUT)");
  cmd->add_option("--seed", seed, "master seed (overrides config)");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  try {
    return run(config_path, workers, out, seed);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
