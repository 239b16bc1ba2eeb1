#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tpshock/inviscid.hpp"
#include "tpshock/signal.hpp"

namespace tpshock::harness {

inline constexpr int kSchemaVersion = 1;

struct SignalSpec {
  std::string kind = "constant";  // constant | sinusoid | file
  double value = 0.0;             // constant
  double mean = 0.0, amplitude = 0.0;  // sinusoid
  double period = 1.0;
  std::string path;  // file: one sample per line, uniform over one period
};

struct InitialSpec {
  // constant | indicator | bump | sine-mode | random-bumps | shock-bump
  std::string kind = "constant";
  double base = 0.0;
  double height = 0.0;
  double a = 0.0, b = 0.0;           // indicator support
  double center = 0.0, width = 1.0;  // bump, shock-bump
  double length = 0.0;               // sine-mode wavelength; 0: -x_left
  double shift = 0.0;                // shock-bump: profile centre
  int count = 0;                     // random-bumps
  double x_min = 0.0, x_max = 0.0;   // random-bumps centres
};

struct GridSpec {
  double x_left = -60.0;
  double dx = 0.02;
  double t_end = 10.0;
  double cfl = 0.0;  // 0: solver default
  double snapshot_dt = 0.5;
  double delta_b = 0.1;
  bool check_incoming = true;
};

struct ExperimentConfig {
  int schema = kSchemaVersion;
  std::string name;
  std::string scenario;
  std::string flux = "burgers";
  double u_minus = 0.0;
  std::optional<double> u_plus;
  std::uint64_t seed = 0;
  SignalSpec boundary;
  InitialSpec initial;
  GridSpec grid;
  std::map<std::string, double> tolerances;  // merged over the scenario defaults
  std::map<std::string, double> options;     // merged over the scenario defaults
  std::filesystem::path base_dir;            // resolves relative file paths
  std::filesystem::path output_dir;
};

const std::vector<std::string>& scenarios();

/// Parses TOML text. Unknown keys, missing required keys and bad values throw ConfigInvalid.
ExperimentConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {},
                              std::string_view default_name = "run");
ExperimentConfig load_config(const std::filesystem::path& file);
/// Scenario-independent checks plus positivity of every tolerance and the incoming margin.
void validate(const ExperimentConfig& cfg);

/// Canonical serialisation (sorted keys, paths excluded) and its 64-bit FNV-1a hash.
std::string canonical(const ExperimentConfig& cfg);
std::uint64_t config_hash(const ExperimentConfig& cfg);

PeriodicSignal make_signal(const SignalSpec& spec, const std::filesystem::path& base_dir = {});
/// Every kind except shock-bump, which needs the profile.
Profile make_initial(const ExperimentConfig& cfg);

struct Check {
  std::string name;
  double measured = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  std::string relation;  // "abs" |m - e| <= tol, "le" m <= tol, "lt" m < tol, "ge" m >= tol
  bool pass = false;
};

Check check_abs(std::string name, double measured, double expected, double tolerance);
Check check_le(std::string name, double measured, double bound);
Check check_lt(std::string name, double measured, double bound);
Check check_ge(std::string name, double measured, double bound);

struct ScenarioResult {
  std::string name, scenario;
  std::uint64_t hash = 0;
  std::uint64_t seed = 0;
  std::string config;  // canonical form
  std::vector<Check> checks;
  std::vector<std::string> artifacts;  // file names inside the output directory
  std::map<std::string, double> metrics;
  double runtime_s = 0.0;
  std::string error;  // non-empty when a module error ended the run
  bool pass() const;
};

/// Dispatches on cfg.scenario, writes CSV artifacts and result.json into cfg.output_dir (when
/// non-empty). Module errors are reported as a failed result, ConfigInvalid is thrown.
ScenarioResult run_scenario(const ExperimentConfig& cfg);

std::string to_json(const ScenarioResult& result);

struct ConvergenceResult {
  std::string diagnostic;  // "exact-l2" or "successive-l1"
  std::vector<double> dx;
  std::vector<double> errors;
  std::vector<double> orders;  // log2(e_k / e_{k+1})
  double observed_order = 0.0;  // last pair
  std::vector<Check> checks;
  bool pass() const;
};

/// Halves dx per level (>= 3 levels). Heat-limit configs (flux zero, sine-mode data, scenario
/// viscous-ibvp) are measured against the separable solution; every other viscous-ibvp or
/// inviscid config by L1 differences of successive levels on the coarse grid. Throws
/// NonMonotoneErrors when the errors do not decrease.
ConvergenceResult convergence_study(const ExperimentConfig& cfg, int levels);
std::string to_json(const ConvergenceResult& result, const ExperimentConfig& cfg);

struct SuiteResult {
  std::vector<ScenarioResult> results;  // in input order
  bool pass() const;
};

std::vector<ExperimentConfig> load_suite(const std::filesystem::path& dir);
/// Runs scenarios on up to `workers` threads; each owns its output directory.
SuiteResult run_suite(const std::vector<ExperimentConfig>& configs, unsigned workers);

/// %.17g rows; deterministic for identical inputs.
void write_csv(const std::filesystem::path& file, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns);

}  // namespace tpshock::harness
