#include <algorithm>
#include <atomic>
#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "tpshock/error.hpp"
#include "tpshock/harness.hpp"
#include "tpshock/ibvp.hpp"
#include "tpshock/inviscid_wave.hpp"
#include "tpshock/numerics.hpp"
#include "tpshock/profile.hpp"
#include "tpshock/viscous_wave.hpp"

namespace tpshock::harness {

namespace {

using Columns = std::vector<std::vector<double>>;

std::string hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

nlohmann::json number_or_null(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

class Run {
 public:
  explicit Run(const ExperimentConfig& cfg) : cfg_(cfg), flux_(FluxModel::by_name(cfg.flux)) {
    out_.name = cfg.name;
    out_.scenario = cfg.scenario;
    out_.hash = config_hash(cfg);
    out_.seed = cfg.seed;
    out_.config = canonical(cfg);
  }

  double tol(const std::string& key) const { return cfg_.tolerances.at(key); }
  double opt(const std::string& key) const { return cfg_.options.at(key); }
  void add(Check c) { out_.checks.push_back(std::move(c)); }
  void metric(const std::string& key, double v) { out_.metrics[key] = v; }
  void csv(const std::string& file, const std::vector<std::string>& header, const Columns& cols) {
    if (cfg_.output_dir.empty()) return;
    write_csv(cfg_.output_dir / file, header, cols);
    out_.artifacts.push_back(file);
  }

  PeriodicSignal boundary() const { return make_signal(cfg_.boundary, cfg_.base_dir); }

  InviscidConfig inviscid_grid() const {
    InviscidConfig c;
    c.x_left = cfg_.grid.x_left;
    c.dx = cfg_.grid.dx;
    c.t_end = cfg_.grid.t_end;
    if (cfg_.grid.cfl > 0.0) c.cfl = cfg_.grid.cfl;
    c.snapshot_dt = cfg_.grid.snapshot_dt;
    c.u_left = cfg_.u_minus;
    c.delta_b = cfg_.grid.delta_b;
    return c;
  }

  ViscousConfig viscous_grid() const {
    ViscousConfig c;
    c.x_left = cfg_.grid.x_left;
    c.dx = cfg_.grid.dx;
    c.t_end = cfg_.grid.t_end;
    if (cfg_.grid.cfl > 0.0) c.cfl = cfg_.grid.cfl;
    c.snapshot_dt = cfg_.grid.snapshot_dt;
    c.u_left = cfg_.u_minus;
    c.delta_b = cfg_.grid.delta_b;
    c.check_incoming = cfg_.grid.check_incoming;
    return c;
  }

  double u_plus(const PeriodicSignal& ub) const {
    return cfg_.u_plus ? *cfg_.u_plus : far_field_state(flux_, ub);
  }

  void inviscid_shift();
  void inviscid_wave_decay();
  void profile_check();
  void viscous_wave();
  void viscous_coupled();
  void viscous_ibvp();
  void scheme_invariants();

  ScenarioResult& result() { return out_; }

 private:
  const ExperimentConfig& cfg_;
  FluxModel flux_;
  ScenarioResult out_;
};

double state_range_violation(const GridSolution& sol, double lo, double hi) {
  double worst = 0.0;
  for (const auto& s : sol.states)
    for (double v : s) worst = std::max({worst, lo - v, v - hi});
  return worst;
}

void Run::inviscid_shift() {
  const auto ub = boundary();
  const auto u0 = make_initial(cfg_);
  const auto grid = inviscid_grid();
  const auto sol = solve_inviscid(flux_, u0, ub, grid);
  const auto shock = make_shock(flux_, cfg_.u_minus, u_plus(ub));
  const auto traj = track_shock(sol, shock);
  const double x_inf = predicted_final_shift(flux_, u0, ub, shock, grid.x_left);
  const double measured = traj.positions.back() - shock.speed * traj.times.back();
  metric("u_plus", shock.u_plus);
  metric("speed", shock.speed);
  metric("predicted_final_shift", x_inf);
  metric("measured_final_shift", measured);
  add(check_abs("final_shift", measured, x_inf, tol("final_shift")));
  add(check_le("conservation_per_step", sol.max_conservation_defect(), tol("conservation")));

  Columns c(4);
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    c[0].push_back(traj.times[i]);
    c[1].push_back(traj.positions[i]);
    c[2].push_back(traj.positions[i] - shock.speed * traj.times[i]);
    c[3].push_back(x_inf);
  }
  csv("trajectory.csv", {"t", "X", "X_minus_st", "X_inf"}, c);

  if (opt("decay") != 0.0) {
    const double t_to = opt("decay_to") > 0.0 ? opt("decay_to") : grid.t_end;
    const auto d =
        shift_decay(flux_, u0, ub, shock, grid, x_inf, opt("decay_from"), t_to, opt("decay_window"));
    metric("decay_order", d.order);
    metric("decay_r_squared", d.fit.r_squared);
    add(check_le("decay_slope", d.fit.slope, opt("decay_max_slope")));
    Columns dc(5);
    for (std::size_t i = 0; i < d.times.size(); ++i) {
      dc[0].push_back(d.times[i]);
      for (std::size_t k = 0; k < 3; ++k) dc[k + 1].push_back(d.raw[k][i]);
      dc[4].push_back(d.extrapolated[i]);
    }
    csv("decay.csv", {"t", "dev_dx", "dev_dx2", "dev_dx4", "extrapolated"}, dc);
    csv("decay_envelope.csv", {"t", "envelope"}, {d.window_times, d.envelope});
  }
}

void Run::inviscid_wave_decay() {
  const auto ub = boundary();
  const auto wave = solve_wave(flux_, ub, {}, cfg_.grid.delta_b);
  const int n = std::max(5, int(opt("probes")));
  const double lo = std::log(opt("probe_min")), hi = std::log(opt("probe_max"));
  std::vector<double> probes;
  for (int k = 0; k < n; ++k) probes.push_back(-std::exp(lo + (hi - lo) * k / (n - 1)));
  const auto diag = decay_diagnostic(wave, probes);
  metric("u_plus", wave.u_bar_plus());
  metric("decay_constant", diag.constant);
  metric("decay_r_squared", diag.r_squared);
  add(check_abs("decay_slope", diag.slope, opt("expected_slope"), tol("decay_slope")));
  csv("wave_decay.csv", {"abs_x", "sup_deviation"}, {diag.distances, diag.deviations});

  double boundary_integral = 0.0;
  for (double v : ub.samples()) boundary_integral += flux_(v);
  boundary_integral *= ub.period() / double(ub.samples().size());
  Columns c(3);
  double worst = 0.0;
  for (double x : {-5.0, -20.0, -80.0}) {
    const double integral = wave.flux_average(x);
    c[0].push_back(x);
    c[1].push_back(integral);
    c[2].push_back(boundary_integral);
    worst = std::max(worst, std::abs(integral - boundary_integral));
  }
  add(check_le("flux_average", worst, tol("flux_average")));
  csv("flux_average.csv", {"x", "flux_integral", "boundary_integral"}, c);
}

void Run::profile_check() {
  const auto ub = boundary();
  const auto shock = make_shock(flux_, cfg_.u_minus, u_plus(ub));
  const auto prof = solve_profile(flux_, shock);
  metric("theta_s", prof.theta());
  const auto& xi = prof.xi();
  Columns c{xi, prof.phi(), prof.dphi(), prof.sigma()};
  std::vector<std::string> header{"xi", "phi", "dphi", "sigma"};
  if (cfg_.flux == "burgers") {
    const double delta = 0.5 * (shock.u_minus - shock.u_plus);
    double worst = 0.0;
    std::vector<double> ref(xi.size());
    for (std::size_t i = 0; i < xi.size(); ++i) {
      ref[i] = shock.speed - delta * std::tanh(0.5 * delta * xi[i]);
      if (std::abs(xi[i]) <= opt("tanh_range"))
        worst = std::max(worst, std::abs(prof.phi()[i] - ref[i]));
    }
    add(check_le("tanh_sup_error", worst, tol("tanh")));
    c.push_back(std::move(ref));
    header.push_back("tanh");
  }
  const auto rates = tail_rates(prof);
  add(check_abs("tail_rate_left", rates.fitted_left, rates.predicted_left,
                tol("tail_rate") * rates.predicted_left));
  add(check_abs("tail_rate_right", rates.fitted_right, rates.predicted_right,
                tol("tail_rate") * rates.predicted_right));
  add(check_le("integral_residual", prof.max_integral_residual(), tol("residual")));
  double sigma_gap = 0.0;
  for (std::size_t i = 0; i < xi.size(); ++i)
    if (const auto alt = prof.sigma_flux_form(i))
      sigma_gap = std::max(sigma_gap, std::abs(*alt - prof.sigma()[i]));
  add(check_le("sigma_double_formula", sigma_gap, tol("sigma")));
  csv("profile.csv", header, c);
}

void Run::viscous_wave() {
  const auto ub = boundary();
  const auto wave = solve_periodic_wave(flux_, ub);
  metric("u_plus", wave.u_bar_plus());
  metric("theta_b", wave.theta_b());
  metric("sweeps", wave.sweeps());
  add(check_lt("contraction_ratio", wave.contraction_ratio(), tol("contraction")));
  const auto fit = decay_check(wave);
  if (!fit.degenerate)
    add(check_abs("dominant_mode_rate", fit.dominant_rate, fit.predicted_mode1,
                  tol("mode_rate") * std::abs(fit.predicted_mode1)));
  if (opt("march_periods") >= 1.0) {
    const auto march = compare_wave_march(flux_, wave, ub, opt("march_dx"), int(opt("march_periods")));
    metric("march_sup_difference", march.sup_difference);
    metric("march_period_drift", march.period_drift);
    add(check_le("march_l2", march.l2_difference, tol("march_l2")));
  }
  if (opt("half_amplitude") != 0.0 && cfg_.boundary.kind == "sinusoid") {
    auto half = cfg_.boundary;
    half.amplitude *= 0.5;
    const auto w2 = solve_periodic_wave(flux_, make_signal(half));
    const double ratio = std::abs(wave.v0_inf()) / std::abs(w2.v0_inf());
    metric("far_field_correction", wave.v0_inf());
    metric("far_field_correction_half", w2.v0_inf());
    add(check_abs("far_field_ratio", ratio, opt("expected_ratio"), tol("far_field_ratio")));
  }
  Columns c(3);
  for (std::size_t j = 0; j < wave.x().size(); ++j) {
    c[0].push_back(wave.x()[j]);
    c[1].push_back(wave.mean_deviation(j).real());
    c[2].push_back(wave.modes() >= 1 ? std::abs(wave.coefficient(j, 1)) : 0.0);
  }
  csv("wave_profile.csv", {"x", "mean_deviation", "mode1_abs"}, c);
  Columns h(2);
  for (std::size_t k = 0; k < wave.residual_history().size(); ++k) {
    h[0].push_back(double(k + 1));
    h[1].push_back(wave.residual_history()[k]);
  }
  csv("wave_history.csv", {"sweep", "residual"}, h);
}

void Run::viscous_coupled() {
  const auto ub = boundary();
  const auto wave = solve_periodic_wave(flux_, ub);
  const auto shock = make_shock(flux_, cfg_.u_minus, wave.u_bar_plus());
  const auto prof = solve_profile(flux_, shock);
  const auto& in = cfg_.initial;
  const double um = cfg_.u_minus, up = wave.u_bar_plus();
  auto u0 = [&](double x) {
    const double s = prof.sigma_at(x - in.shift);
    const double r = (x - in.center) / in.width;
    const double b = std::abs(r) < 1.0 ? std::pow(std::cos(0.5 * std::numbers::pi * r), 4) : 0.0;
    return um * (1.0 - s) + up * s + in.height * b;
  };
  CoupledConfig cc;
  cc.grid = viscous_grid();
  cc.tol_shift = tol("shift_change");
  cc.gap_fraction = tol("gap_fraction");
  cc.drift_factor = tol("drift_factor");
  cc.domain_margin = opt("domain_margin");
  cc.resolution = opt("resolution");
  cc.scheme_boundary_flux = opt("scheme_boundary_flux") != 0.0;
  const auto res = run_coupled(flux_, u0, ub, prof, wave, cc);
  const auto& v = res.verdict;
  metric("x0", res.shift.x0);
  metric("x_end", res.shift.shift.back());
  metric("theta_s", res.theta_s);
  metric("gap_initial", v.gap_initial);
  metric("gap_final", v.gap_final);
  metric("ansatz_gap_r2", v.ansatz_gap_r2);
  add(check_lt("superposition_gap_ratio", v.gap_final / v.gap_initial, tol("gap_fraction")));
  add(check_lt("shift_change", v.shift_change, tol("shift_change")));
  add(check_le("mass_defect", v.max_defect, v.drift_bound));
  add(check_lt("ansatz_gap_slope", v.ansatz_gap_slope, 0.0));
  add(check_ge("ansatz_gap_r2", v.ansatz_gap_r2, tol("ansatz_r2")));

  const auto& sol = res.solution;
  Columns sc(5);
  for (std::size_t k = 0; k < sol.times.size(); ++k) {
    const double t = sol.times[k];
    const auto it = std::lower_bound(res.shift.times.begin(), res.shift.times.end(), t - 1e-9);
    const auto i = std::size_t(std::min<std::ptrdiff_t>(it - res.shift.times.begin(),
                                                        std::ptrdiff_t(res.shift.times.size()) - 1));
    sc[0].push_back(t);
    sc[1].push_back(res.shift.shift[i]);
    sc[2].push_back(res.shift.rate[i]);
    sc[3].push_back(res.shift.mass_defect[i]);
    sc[4].push_back(res.superposition_gap[k]);
  }
  csv("shift.csv", {"t", "X", "dXdt", "mass_defect", "sup_gap_superposition"}, sc);

  const std::size_t stride = std::max<std::size_t>(1, std::size_t(opt("snapshot_stride")));
  Columns snap(4);
  for (std::size_t k = 0; k < sol.times.size(); k += stride)
    for (std::size_t j = 0; j < sol.x.size(); ++j) {
      snap[0].push_back(sol.times[k]);
      snap[1].push_back(sol.x[j]);
      snap[2].push_back(sol.states[k][j]);
      snap[3].push_back(res.u_sharp[k][j]);
    }
  csv("snapshots.csv", {"t", "x", "u", "u_sharp"}, snap);
}

double exact_heat(const ExperimentConfig& cfg, double x, double t) {
  const double length = cfg.initial.length > 0.0 ? cfg.initial.length : -cfg.grid.x_left;
  const double k = 2.0 * std::numbers::pi / length;
  return cfg.initial.base + cfg.initial.height * std::exp(-k * k * t) * std::sin(k * x);
}

bool heat_limit(const ExperimentConfig& cfg) {
  return cfg.scenario == "viscous-ibvp" && cfg.flux == "zero" && cfg.initial.kind == "sine-mode";
}

double min_dt(const GridSolution& sol) {
  return *std::min_element(sol.step_dt.begin(), sol.step_dt.end());
}

void Run::viscous_ibvp() {
  const auto ub = boundary();
  const auto u0 = make_initial(cfg_);
  auto grid = viscous_grid();
  if (opt("neumann") != 0.0) grid.left = LeftBoundary::Neumann;
  const auto sol = solve_viscous(flux_, u0, ub, grid);
  add(check_le("conservation_per_unit_time", sol.max_conservation_defect() / min_dt(sol),
               tol("conservation")));
  const auto& first = sol.states.front();
  double lo = std::min({*std::min_element(first.begin(), first.end()), ub.min_sample(), grid.u_left});
  double hi = std::max({*std::max_element(first.begin(), first.end()), ub.max_sample(), grid.u_left});
  if (grid.left == LeftBoundary::Neumann) {
    lo = std::min(*std::min_element(first.begin(), first.end()), ub.min_sample());
    hi = std::max(*std::max_element(first.begin(), first.end()), ub.max_sample());
  }
  add(check_le("bounds", state_range_violation(sol, lo, hi), tol("bounds")));
  if (heat_limit(cfg_)) {
    double err = 0.0;
    for (std::size_t j = 0; j < sol.x.size(); ++j) {
      const double d = sol.states.back()[j] - exact_heat(cfg_, sol.x[j], sol.times.back());
      err += d * d;
    }
    add(check_le("exact_l2", std::sqrt(err * sol.dx), tol("exact_l2")));
  }
  csv("final.csv", {"x", "u"}, {sol.x, sol.states.back()});
  csv("mass.csv", {"t", "mass"},
      {[&] {
         std::vector<double> t{0.0};
         t.insert(t.end(), sol.step_times.begin(), sol.step_times.end());
         return t;
       }(),
       sol.mass});
}

double total_variation(double left, const std::vector<double>& u) {
  double tv = std::abs(u.front() - left);
  for (std::size_t j = 1; j < u.size(); ++j) tv += std::abs(u[j] - u[j - 1]);
  return tv;
}

void Run::scheme_invariants() {
  const auto ub = boundary();
  const auto u0 = make_initial(cfg_);

  auto grid = inviscid_grid();
  grid.u_left = cfg_.initial.base;
  const auto sol = solve_inviscid(flux_, u0, ub, grid);
  add(check_le("godunov_conservation_per_step", sol.max_conservation_defect(),
               tol("godunov_conservation")));
  const auto& first = sol.states.front();
  const double lo =
      std::min({*std::min_element(first.begin(), first.end()), ub.min_sample(), grid.u_left});
  const double hi =
      std::max({*std::max_element(first.begin(), first.end()), ub.max_sample(), grid.u_left});
  add(check_le("godunov_bounds", state_range_violation(sol, lo, hi), tol("bounds")));

  auto whole = grid;
  whole.right = RightBoundary::Outflow;
  const auto wl = solve_inviscid(flux_, u0, ub, whole);
  double tv_growth = 0.0;
  for (std::size_t k = 1; k < wl.states.size(); ++k)
    tv_growth = std::max(tv_growth, total_variation(grid.u_left, wl.states[k]) -
                                        total_variation(grid.u_left, wl.states[k - 1]));
  add(check_le("tvd_growth", tv_growth, tol("tvd")));

  auto vgrid = viscous_grid();
  vgrid.u_left = cfg_.initial.base;
  const auto vs = solve_viscous(flux_, u0, ub, vgrid);
  add(check_le("viscous_conservation_per_unit_time", vs.max_conservation_defect() / min_dt(vs),
               tol("viscous_conservation")));
  add(check_le("viscous_bounds", state_range_violation(vs, lo, hi), tol("viscous_bounds")));

  const auto shock = make_shock(flux_, cfg_.u_minus, u_plus(ub));
  const auto prof = solve_profile(flux_, shock);
  add(check_le("profile_integral_residual", prof.max_integral_residual(), tol("profile_residual")));
  double sigma_gap = 0.0;
  for (std::size_t i = 0; i < prof.xi().size(); ++i)
    if (const auto alt = prof.sigma_flux_form(i))
      sigma_gap = std::max(sigma_gap, std::abs(*alt - prof.sigma()[i]));
  add(check_le("sigma_double_formula", sigma_gap, tol("sigma")));

  if (cfg_.boundary.kind == "sinusoid" && cfg_.boundary.amplitude != 0.0) {
    const auto wave = solve_periodic_wave(flux_, ub);
    const auto col = collocation_residual(flux_, wave);
    metric("collocation_residual", col.max_residual);
    metric("collocation_bound", col.max_bound);
    add(check_le("collocation_residual", col.max_residual, tol("collocation_factor") * col.max_bound));
    add(check_lt("contraction_ratio", wave.contraction_ratio(), 1.0));
  }
  csv("initial.csv", {"x", "u"}, {sol.x, sol.states.front()});
}

}  // namespace

Check check_abs(std::string name, double measured, double expected, double tolerance) {
  return {std::move(name), measured, expected, tolerance, "abs",
          std::abs(measured - expected) <= tolerance};
}
Check check_le(std::string name, double measured, double bound) {
  return {std::move(name), measured, std::numeric_limits<double>::quiet_NaN(), bound, "le",
          measured <= bound};
}
Check check_lt(std::string name, double measured, double bound) {
  return {std::move(name), measured, std::numeric_limits<double>::quiet_NaN(), bound, "lt",
          measured < bound};
}
Check check_ge(std::string name, double measured, double bound) {
  return {std::move(name), measured, std::numeric_limits<double>::quiet_NaN(), bound, "ge",
          measured >= bound};
}

bool ScenarioResult::pass() const {
  if (!error.empty() || checks.empty()) return false;
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

bool ConvergenceResult::pass() const {
  return !checks.empty() &&
         std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

bool SuiteResult::pass() const {
  return !results.empty() && std::all_of(results.begin(), results.end(),
                                         [](const ScenarioResult& r) { return r.pass(); });
}

void write_csv(const std::filesystem::path& file, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns) {
  if (header.size() != columns.size())
    throw Error(ErrorKind::InvalidArgument, "write_csv: header and column counts differ");
  const std::size_t rows = columns.empty() ? 0 : columns.front().size();
  for (const auto& c : columns)
    if (c.size() != rows) throw Error(ErrorKind::InvalidArgument, "write_csv: ragged columns");
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  std::FILE* f = std::fopen(file.c_str(), "w");
  if (!f) throw Error(ErrorKind::InvalidArgument, "write_csv: cannot open " + file.string());
  for (std::size_t k = 0; k < header.size(); ++k)
    std::fprintf(f, "%s%s", k ? "," : "", header[k].c_str());
  std::fputc('\n', f);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t k = 0; k < columns.size(); ++k)
      std::fprintf(f, "%s%.17g", k ? "," : "", columns[k][i]);
    std::fputc('\n', f);
  }
  std::fclose(f);
}

std::string to_json(const ScenarioResult& r) {
  nlohmann::json j;
  j["name"] = r.name;
  j["scenario"] = r.scenario;
  j["schema"] = kSchemaVersion;
  j["config_hash"] = hex(r.hash);
  j["seed"] = r.seed;
  j["pass"] = r.pass();
  j["runtime_s"] = r.runtime_s;
  j["error"] = r.error.empty() ? nlohmann::json(nullptr) : nlohmann::json(r.error);
  j["checks"] = nlohmann::json::array();
  for (const auto& c : r.checks)
    j["checks"].push_back({{"name", c.name},
                           {"measured", number_or_null(c.measured)},
                           {"expected", number_or_null(c.expected)},
                           {"tolerance", number_or_null(c.tolerance)},
                           {"relation", c.relation},
                           {"pass", c.pass}});
  nlohmann::json metrics = nlohmann::json::object();
  for (const auto& [k, v] : r.metrics) metrics[k] = number_or_null(v);
  j["metrics"] = metrics;
  j["artifacts"] = r.artifacts;
  j["config"] = r.config.empty() ? nlohmann::json(nullptr) : nlohmann::json::parse(r.config);
  return j.dump(2);
}

ScenarioResult run_scenario(const ExperimentConfig& cfg) {
  validate(cfg);
  Run run(cfg);
  if (!cfg.output_dir.empty()) std::filesystem::create_directories(cfg.output_dir);
  const auto t0 = std::chrono::steady_clock::now();
  static const std::map<std::string, void (Run::*)()> table{
      {"inviscid-shift", &Run::inviscid_shift},
      {"inviscid-wave-decay", &Run::inviscid_wave_decay},
      {"profile-check", &Run::profile_check},
      {"viscous-wave", &Run::viscous_wave},
      {"viscous-coupled", &Run::viscous_coupled},
      {"viscous-ibvp", &Run::viscous_ibvp},
      {"scheme-invariants", &Run::scheme_invariants},
  };
  try {
    (run.*table.at(cfg.scenario))();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ConfigInvalid) throw;
    run.result().error = e.what();
  }
  auto& out = run.result();
  out.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!cfg.output_dir.empty()) {
    std::ofstream(cfg.output_dir / "result.json") << to_json(out) << '\n';
  }
  return out;
}

namespace {

std::vector<double> restrict_cells(const std::vector<double>& u, std::size_t factor) {
  std::vector<double> r(u.size() / factor, 0.0);
  for (std::size_t i = 0; i < r.size(); ++i) {
    for (std::size_t k = 0; k < factor; ++k) r[i] += u[i * factor + k];
    r[i] /= double(factor);
  }
  return r;
}

std::vector<double> restrict_nodes(const std::vector<double>& u, std::size_t factor) {
  std::vector<double> r((u.size() - 1) / factor + 1);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = u[i * factor];
  return r;
}

}  // namespace

ConvergenceResult convergence_study(const ExperimentConfig& cfg, int levels) {
  validate(cfg);
  if (levels < 3) throw Error(ErrorKind::InvalidArgument, "convergence study needs >= 3 levels");
  const bool viscous = cfg.scenario == "viscous-ibvp";
  if (!viscous && cfg.scenario != "inviscid-shift")
    throw Error(ErrorKind::ConfigInvalid,
                "convergence study runs on inviscid-shift or viscous-ibvp configs, not " +
                    cfg.scenario);
  const FluxModel flux = FluxModel::by_name(cfg.flux);
  const auto ub = make_signal(cfg.boundary, cfg.base_dir);
  const auto u0 = make_initial(cfg);
  ConvergenceResult out;
  out.diagnostic = heat_limit(cfg) ? "exact-l2" : "successive-l1";

  std::vector<std::vector<double>> finals;  // restricted to the coarsest grid
  for (int level = 0; level < levels; ++level) {
    const double dx = cfg.grid.dx / std::pow(2.0, level);
    const std::size_t factor = std::size_t(1) << level;
    out.dx.push_back(dx);
    if (viscous) {
      ViscousConfig g;
      g.x_left = cfg.grid.x_left;
      g.dx = dx;
      g.t_end = cfg.grid.t_end;
      if (cfg.grid.cfl > 0.0) g.cfl = cfg.grid.cfl;
      g.snapshot_dt = cfg.grid.snapshot_dt;
      g.u_left = cfg.u_minus;
      g.delta_b = cfg.grid.delta_b;
      g.check_incoming = cfg.grid.check_incoming;
      if (cfg.options.at("neumann") != 0.0) g.left = LeftBoundary::Neumann;
      const auto sol = solve_viscous(flux, u0, ub, g);
      if (heat_limit(cfg)) {
        double err = 0.0;
        for (std::size_t j = 0; j < sol.x.size(); ++j) {
          const double d = sol.states.back()[j] - exact_heat(cfg, sol.x[j], sol.times.back());
          err += d * d;
        }
        out.errors.push_back(std::sqrt(err * dx));
      }
      finals.push_back(restrict_nodes(sol.states.back(), factor));
    } else {
      InviscidConfig g;
      g.x_left = cfg.grid.x_left;
      g.dx = dx;
      g.t_end = cfg.grid.t_end;
      if (cfg.grid.cfl > 0.0) g.cfl = cfg.grid.cfl;
      g.snapshot_dt = cfg.grid.snapshot_dt;
      g.u_left = cfg.u_minus;
      g.delta_b = cfg.grid.delta_b;
      const auto sol = solve_inviscid(flux, u0, ub, g);
      finals.push_back(restrict_cells(sol.states.back(), factor));
    }
  }
  if (!heat_limit(cfg)) {
    for (std::size_t k = 0; k + 1 < finals.size(); ++k) {
      double d = 0.0;
      for (std::size_t i = 0; i < finals[k].size(); ++i) d += std::abs(finals[k][i] - finals[k + 1][i]);
      out.errors.push_back(d * cfg.grid.dx);
    }
  }
  for (std::size_t k = 0; k + 1 < out.errors.size(); ++k) {
    if (!(out.errors[k + 1] < out.errors[k])) {
      std::ostringstream msg;
      msg << "errors do not decrease: level " << k << " " << out.errors[k] << " -> "
          << out.errors[k + 1];
      throw Error(ErrorKind::NonMonotoneErrors, msg.str());
    }
    out.orders.push_back(std::log2(out.errors[k] / out.errors[k + 1]));
  }
  out.observed_order = out.orders.back();
  out.checks.push_back(check_abs("observed_order", out.observed_order,
                                 cfg.options.at("expected_order"), cfg.tolerances.at("order")));
  if (!cfg.output_dir.empty()) {
    std::filesystem::create_directories(cfg.output_dir);
    std::vector<double> level, err(out.errors), order{std::numeric_limits<double>::quiet_NaN()};
    std::vector<double> dx(out.dx.begin(), out.dx.begin() + std::ptrdiff_t(out.errors.size()));
    for (std::size_t k = 0; k < out.errors.size(); ++k) level.push_back(double(k));
    order.insert(order.end(), out.orders.begin(), out.orders.end());
    write_csv(cfg.output_dir / "convergence.csv", {"level", "dx", "error", "order"},
              {level, dx, err, order});
    std::ofstream(cfg.output_dir / "convergence.json") << to_json(out, cfg) << '\n';
  }
  return out;
}

std::string to_json(const ConvergenceResult& r, const ExperimentConfig& cfg) {
  nlohmann::json j;
  j["name"] = cfg.name;
  j["scenario"] = cfg.scenario;
  j["schema"] = kSchemaVersion;
  j["config_hash"] = hex(config_hash(cfg));
  j["diagnostic"] = r.diagnostic;
  j["dx"] = r.dx;
  j["errors"] = r.errors;
  j["orders"] = r.orders;
  j["observed_order"] = r.observed_order;
  j["pass"] = r.pass();
  j["checks"] = nlohmann::json::array();
  for (const auto& c : r.checks)
    j["checks"].push_back({{"name", c.name},
                           {"measured", number_or_null(c.measured)},
                           {"expected", number_or_null(c.expected)},
                           {"tolerance", number_or_null(c.tolerance)},
                           {"relation", c.relation},
                           {"pass", c.pass}});
  j["config"] = nlohmann::json::parse(canonical(cfg));
  return j.dump(2);
}

std::vector<ExperimentConfig> load_suite(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir))
    throw Error(ErrorKind::ConfigInvalid, dir.string() + " is not a directory");
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".toml") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw Error(ErrorKind::ConfigInvalid, "no .toml configs in " + dir.string());
  std::vector<ExperimentConfig> out;
  for (const auto& f : files) out.push_back(load_config(f));
  return out;
}

SuiteResult run_suite(const std::vector<ExperimentConfig>& configs, unsigned workers) {
  SuiteResult out;
  out.results.resize(configs.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < configs.size(); i = next++) {
      try {
        out.results[i] = run_scenario(configs[i]);
      } catch (const std::exception& e) {
        out.results[i].name = configs[i].name;
        out.results[i].scenario = configs[i].scenario;
        out.results[i].error = e.what();
      }
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(workers, unsigned(configs.size())));
  std::vector<std::thread> pool;
  for (unsigned k = 1; k < n; ++k) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  return out;
}

}  // namespace tpshock::harness
