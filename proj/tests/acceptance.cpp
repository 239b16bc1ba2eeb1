#include <cstdio>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "tpshock/error.hpp"
#include "tpshock/harness.hpp"

namespace fs = std::filesystem;
using namespace tpshock::harness;

namespace {

struct Line {
  std::string criterion;
  bool pass = true;
  std::string detail;
};

const Check* find(const ScenarioResult& r, const std::string& name) {
  for (const auto& c : r.checks)
    if (c.name == name) return &c;
  return nullptr;
}

class Report {
 public:
  explicit Report(std::map<std::string, ScenarioResult> results) : results_(std::move(results)) {}

  /// One criterion built from checks of one scenario plus an optional runtime limit.
  void add(const std::string& criterion, const std::string& scenario,
           const std::vector<std::string>& checks, double max_runtime_s = 0.0) {
    Line line{criterion, true, ""};
    const auto it = results_.find(scenario);
    if (it == results_.end()) {
      line.pass = false;
      line.detail = "scenario " + scenario + " missing";
      lines_.push_back(line);
      return;
    }
    const auto& r = it->second;
    if (!r.error.empty()) {
      line.pass = false;
      line.detail = r.error;
      lines_.push_back(line);
      return;
    }
    char buf[256];
    for (const auto& name : checks) {
      const Check* c = find(r, name);
      if (!c) {
        line.pass = false;
        line.detail += name + " missing; ";
        continue;
      }
      line.pass = line.pass && c->pass;
      if (c->relation == "abs")
        std::snprintf(buf, sizeof buf, "%s=%.6g (expected %.6g +/- %.3g); ", name.c_str(),
                      c->measured, c->expected, c->tolerance);
      else
        std::snprintf(buf, sizeof buf, "%s=%.6g (%s %.3g); ", name.c_str(), c->measured,
                      c->relation.c_str(), c->tolerance);
      line.detail += buf;
    }
    if (max_runtime_s > 0.0) {
      const bool fast = r.runtime_s <= max_runtime_s;
      line.pass = line.pass && fast;
      std::snprintf(buf, sizeof buf, "runtime=%.2fs (le %.0fs)", r.runtime_s, max_runtime_s);
      line.detail += buf;
    }
    lines_.push_back(line);
  }

  bool print() const {
    bool all = true;
    for (auto l : lines_) {
      while (!l.detail.empty() && (l.detail.back() == ' ' || l.detail.back() == ';'))
        l.detail.pop_back();
      std::printf("%s  %s: %s\n", l.pass ? "PASS" : "FAIL", l.criterion.c_str(), l.detail.c_str());
      all = all && l.pass;
    }
    std::printf("%s  %zu criteria\n", all ? "PASS" : "FAIL", lines_.size());
    return all;
  }

 private:
  std::map<std::string, ScenarioResult> results_;
  std::vector<Line> lines_;
};

}  // namespace

int main(int argc, char** argv) {
  const fs::path config_dir = argc > 1 ? fs::path(argv[1]) : fs::path(TPSHOCK_CONFIG_DIR);
  const fs::path out_dir = argc > 2 ? fs::path(argv[2]) : fs::path("acceptance_out");
  std::map<std::string, ScenarioResult> results;
  try {
    auto configs = load_suite(config_dir);
    for (auto& cfg : configs) {
      cfg.output_dir = out_dir / cfg.name;
      // Sequential on purpose: the runtime limits are per scenario on one core.
      results[cfg.name] = run_scenario(cfg);
    }
  } catch (const tpshock::Error& e) {
    std::printf("FAIL  configuration: %s\n", e.what());
    return 1;
  }

  Report rep(std::move(results));
  rep.add("inviscid final shift", "inviscid_shift", {"final_shift"}, 120.0);
  rep.add("inviscid shift decay rate", "inviscid_shift", {"decay_slope"});
  rep.add("boundary-wave 1/|x| decay", "inviscid_wave_decay", {"decay_slope"}, 60.0);
  rep.add("flux-average conservation", "inviscid_wave_decay", {"flux_average"});
  rep.add("viscous profile", "profile_check", {"tanh_sup_error", "tail_rate_left", "tail_rate_right"},
          5.0);
  rep.add("viscous periodic wave", "viscous_wave",
          {"march_l2", "dominant_mode_rate", "contraction_ratio"}, 180.0);
  rep.add("quadratic far-field correction", "viscous_wave", {"far_field_ratio"});
  rep.add("viscous coupled run", "viscous_coupled",
          {"superposition_gap_ratio", "shift_change", "mass_defect"}, 600.0);
  rep.add("ansatz-vs-superposition gap", "viscous_coupled", {"ansatz_gap_slope", "ansatz_gap_r2"});
  rep.add("scheme invariant suites", "scheme_invariants",
          {"godunov_conservation_per_step", "godunov_bounds", "tvd_growth",
           "viscous_conservation_per_unit_time", "viscous_bounds", "profile_integral_residual",
           "sigma_double_formula", "collocation_residual", "contraction_ratio"});
  return rep.print() ? 0 : 1;
}
