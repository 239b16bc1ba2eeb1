#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "tpshock/error.hpp"
#include "tpshock/harness.hpp"

namespace fs = std::filesystem;
using namespace tpshock;
using namespace tpshock::harness;

namespace {

void apply_overrides(ExperimentConfig& cfg, const std::optional<std::string>& out,
                     const std::optional<std::uint64_t>& seed, bool per_scenario) {
  if (out) cfg.output_dir = per_scenario ? fs::path(*out) / cfg.name : fs::path(*out);
  if (cfg.output_dir.empty()) cfg.output_dir = fs::path("out") / cfg.name;
  if (seed) cfg.seed = *seed;
}

void print(const ScenarioResult& r) {
  std::printf("[%s] %s (%s) %.2fs\n", r.pass() ? "PASS" : "FAIL", r.name.c_str(),
              r.scenario.c_str(), r.runtime_s);
  for (const auto& c : r.checks)
    std::printf("    %-4s %-36s measured %.6g  %s %.6g%s\n", c.pass ? "ok" : "FAIL",
                c.name.c_str(), c.measured,
                c.relation == "abs" ? "expected" : c.relation.c_str(),
                c.relation == "abs" ? c.expected : c.tolerance,
                c.relation == "abs" ? (" +/- " + std::to_string(c.tolerance)).c_str() : "");
  if (!r.error.empty()) std::printf("    error: %s\n", r.error.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scalar conservation laws on the half-line with time-periodic boundary data"};
  app.require_subcommand(1);
  app.fallthrough();
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  app.add_option("--out", out, "Output directory");
  app.add_option("--seed", seed, "Seed for randomised initial data");

  std::string config_path;
  auto* run = app.add_subcommand("run", "Run one scenario config");
  run->add_option("config", config_path, "Scenario TOML")->required()->check(CLI::ExistingFile);

  std::string suite_dir;
  unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  auto* suite = app.add_subcommand("suite", "Run every *.toml in a directory");
  suite->add_option("dir", suite_dir, "Config directory")->required()->check(CLI::ExistingDirectory);
  suite->add_option("--workers", workers, "Concurrent scenarios")->check(CLI::PositiveNumber);

  int levels = 3;
  auto* conv = app.add_subcommand("converge", "Grid refinement study");
  conv->add_option("config", config_path, "Scenario TOML")->required()->check(CLI::ExistingFile);
  conv->add_option("--levels", levels, "Refinement levels (>= 3)")->check(CLI::Range(3, 12));

  auto* list = app.add_subcommand("scenarios", "List scenario names");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*list) {
      for (const auto& s : scenarios()) std::printf("%s\n", s.c_str());
      return 0;
    }
    if (*run) {
      auto cfg = load_config(config_path);
      apply_overrides(cfg, out, seed, false);
      const auto r = run_scenario(cfg);
      print(r);
      return r.pass() ? 0 : 1;
    }
    if (*suite) {
      auto configs = load_suite(suite_dir);
      for (auto& c : configs) apply_overrides(c, out, seed, true);
      const auto res = run_suite(configs, workers);
      nlohmann::json summary = nlohmann::json::array();
      for (const auto& r : res.results) {
        print(r);
        summary.push_back({{"name", r.name}, {"scenario", r.scenario}, {"pass", r.pass()}});
      }
      const fs::path root = out ? fs::path(*out) : fs::path("out");
      fs::create_directories(root);
      std::ofstream(root / "suite.json")
          << nlohmann::json{{"pass", res.pass()}, {"results", summary}}.dump(2) << '\n';
      std::printf("suite: %s\n", res.pass() ? "PASS" : "FAIL");
      return res.pass() ? 0 : 1;
    }
    if (*conv) {
      auto cfg = load_config(config_path);
      apply_overrides(cfg, out, seed, false);
      const auto r = convergence_study(cfg, levels);
      for (std::size_t k = 0; k < r.errors.size(); ++k)
        std::printf("level %zu dx %.6g %s %.6e%s\n", k, r.dx[k], r.diagnostic.c_str(),
                    r.errors[k],
                    k ? (" order " + std::to_string(r.orders[k - 1])).c_str() : "");
      for (const auto& c : r.checks)
        std::printf("[%s] %s %.4f expected %.4f +/- %.4f\n", c.pass ? "PASS" : "FAIL",
                    c.name.c_str(), c.measured, c.expected, c.tolerance);
      return r.pass() ? 0 : 1;
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 2;
}
