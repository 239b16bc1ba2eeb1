#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>
#include <toml.hpp>

#include "tpshock/error.hpp"
#include "tpshock/flux.hpp"
#include "tpshock/harness.hpp"

namespace tpshock::harness {

namespace {

using Table = std::map<std::string, double>;

struct ScenarioDefaults {
  Table tolerances;
  Table options;
};

const std::map<std::string, ScenarioDefaults>& defaults() {
  static const std::map<std::string, ScenarioDefaults> d{
      {"inviscid-shift",
       {{{"conservation", 1e-10}, {"order", 0.2}},
        {{"decay", 0.0}, {"decay_from", 20.0}, {"decay_to", 0.0}, {"decay_window", 5.0},
         {"decay_max_slope", -0.35}, {"expected_order", 1.0}}}},
      {"inviscid-wave-decay",
       {{{"decay_slope", 0.15}, {"flux_average", 1e-5}},
        {{"probe_min", 10.0}, {"probe_max", 100.0}, {"probes", 16.0}, {"expected_slope", -1.0}}}},
      {"profile-check",
       {{{"tanh", 1e-8}, {"tail_rate", 0.02}, {"residual", 1e-9}, {"sigma", 1e-9}},
        {{"tanh_range", 40.0}}}},
      {"viscous-wave",
       {{{"march_l2", 5e-3}, {"mode_rate", 0.1}, {"contraction", 0.5}, {"far_field_ratio", 1.0}},
        {{"march_dx", 0.02}, {"march_periods", 50.0}, {"half_amplitude", 1.0},
         {"expected_ratio", 4.0}}}},
      {"viscous-coupled",
       {{{"gap_fraction", 0.1}, {"shift_change", 0.02}, {"drift_factor", 1e-4},
         {"ansatz_r2", 0.9}},
        {{"resolution", 20.0}, {"domain_margin", 60.0}, {"scheme_boundary_flux", 1.0},
         {"snapshot_stride", 10.0}}}},
      {"viscous-ibvp",
       {{{"conservation", 1e-8}, {"bounds", 1e-3}, {"exact_l2", 1e-3}, {"order", 0.2}},
        {{"neumann", 0.0}, {"expected_order", 2.0}}}},
      {"scheme-invariants",
       {{{"godunov_conservation", 1e-10}, {"bounds", 1e-12}, {"tvd", 1e-12},
         {"viscous_conservation", 1e-8}, {"viscous_bounds", 1e-3}, {"profile_residual", 1e-9},
         {"sigma", 1e-9}, {"collocation_factor", 10.0}},
        {}}},
  };
  return d;
}

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorKind::ConfigInvalid, what); }

void reject_unknown(const toml::table& t, const std::set<std::string>& allowed,
                    const std::string& where) {
  for (const auto& [k, v] : t) {
    (void)v;
    if (!allowed.count(std::string(k.str())))
      invalid("unknown key '" + std::string(k.str()) + "' in " + where);
  }
}

double number(const toml::table& t, const std::string& key, double fallback,
              const std::string& where) {
  const auto* node = t.get(key);
  if (!node) return fallback;
  if (auto v = node->value<double>()) return *v;
  invalid("'" + key + "' in " + where + " must be a number");
}

std::string text(const toml::table& t, const std::string& key, const std::string& fallback,
                 const std::string& where) {
  const auto* node = t.get(key);
  if (!node) return fallback;
  if (auto v = node->value<std::string>()) return *v;
  invalid("'" + key + "' in " + where + " must be a string");
}

const toml::table* subtable(const toml::table& t, const std::string& key) {
  const auto* node = t.get(key);
  if (!node) return nullptr;
  if (!node->is_table()) invalid("'" + key + "' must be a table");
  return node->as_table();
}

Table merge(const Table& base, const toml::table* over, const std::string& where) {
  Table out = base;
  if (!over) return out;
  for (const auto& [k, v] : *over) {
    const std::string key(k.str());
    if (!base.count(key) && !(where == "tolerances" && key == "final_shift"))
      invalid("unknown key '" + key + "' in [" + where + "]");
    if (auto d = v.value<double>())
      out[key] = *d;
    else
      invalid("'" + key + "' in [" + where + "] must be a number");
  }
  return out;
}

double bump(double x, double center, double width) {
  const double r = (x - center) / width;
  return std::abs(r) < 1.0 ? std::pow(std::cos(0.5 * std::numbers::pi * r), 4) : 0.0;
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

const std::vector<std::string>& scenarios() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [k, d] : defaults()) v.push_back(k);
    return v;
  }();
  return names;
}

ExperimentConfig parse_config(std::string_view source, const std::filesystem::path& base_dir,
                              std::string_view default_name) {
  toml::table root;
  try {
    root = toml::parse(source);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << "TOML: " << e.description() << " at line " << e.source().begin.line;
    invalid(msg.str());
  }
  reject_unknown(root,
                 {"schema", "name", "scenario", "flux", "u_minus", "u_plus", "seed", "boundary",
                  "initial", "grid", "tolerances", "options", "output"},
                 "top level");

  ExperimentConfig cfg;
  cfg.base_dir = base_dir;
  const auto* schema = root.get("schema");
  if (!schema) invalid("missing 'schema'");
  const auto sv = schema->value<int64_t>();
  if (!sv) invalid("'schema' must be an integer");
  cfg.schema = int(*sv);
  if (cfg.schema != kSchemaVersion)
    invalid("schema " + std::to_string(cfg.schema) + " is not supported (expected " +
            std::to_string(kSchemaVersion) + ")");

  cfg.scenario = text(root, "scenario", "", "top level");
  const auto it = defaults().find(cfg.scenario);
  if (it == defaults().end()) invalid("unknown scenario '" + cfg.scenario + "'");
  cfg.name = text(root, "name", std::string(default_name), "top level");
  cfg.flux = text(root, "flux", "burgers", "top level");
  cfg.u_minus = number(root, "u_minus", 0.0, "top level");
  if (root.get("u_plus")) cfg.u_plus = number(root, "u_plus", 0.0, "top level");
  if (const auto* s = root.get("seed")) {
    const auto v = s->value<int64_t>();
    if (!v || *v < 0) invalid("'seed' must be a non-negative integer");
    cfg.seed = std::uint64_t(*v);
  }

  if (const auto* b = subtable(root, "boundary")) {
    reject_unknown(*b, {"kind", "value", "mean", "amplitude", "period", "path"}, "[boundary]");
    auto& s = cfg.boundary;
    s.kind = text(*b, "kind", "constant", "[boundary]");
    s.value = number(*b, "value", 0.0, "[boundary]");
    s.mean = number(*b, "mean", 0.0, "[boundary]");
    s.amplitude = number(*b, "amplitude", 0.0, "[boundary]");
    s.period = number(*b, "period", 1.0, "[boundary]");
    s.path = text(*b, "path", "", "[boundary]");
  }
  if (const auto* i = subtable(root, "initial")) {
    reject_unknown(*i,
                   {"kind", "base", "value", "height", "a", "b", "center", "width", "length",
                    "shift", "count", "x_min", "x_max"},
                   "[initial]");
    auto& s = cfg.initial;
    s.kind = text(*i, "kind", "constant", "[initial]");
    s.base = number(*i, "base", number(*i, "value", cfg.u_minus, "[initial]"), "[initial]");
    s.height = number(*i, "height", 0.0, "[initial]");
    s.a = number(*i, "a", 0.0, "[initial]");
    s.b = number(*i, "b", 0.0, "[initial]");
    s.center = number(*i, "center", 0.0, "[initial]");
    s.width = number(*i, "width", 1.0, "[initial]");
    s.length = number(*i, "length", 0.0, "[initial]");
    s.shift = number(*i, "shift", 0.0, "[initial]");
    s.count = int(number(*i, "count", 0.0, "[initial]"));
    s.x_min = number(*i, "x_min", 0.0, "[initial]");
    s.x_max = number(*i, "x_max", 0.0, "[initial]");
  } else {
    cfg.initial.base = cfg.u_minus;
  }
  if (const auto* g = subtable(root, "grid")) {
    reject_unknown(*g, {"x_left", "dx", "t_end", "cfl", "snapshot_dt", "delta_b", "check_incoming"},
                   "[grid]");
    auto& s = cfg.grid;
    s.x_left = number(*g, "x_left", s.x_left, "[grid]");
    s.dx = number(*g, "dx", s.dx, "[grid]");
    s.t_end = number(*g, "t_end", s.t_end, "[grid]");
    s.cfl = number(*g, "cfl", s.cfl, "[grid]");
    s.snapshot_dt = number(*g, "snapshot_dt", s.snapshot_dt, "[grid]");
    s.delta_b = number(*g, "delta_b", s.delta_b, "[grid]");
    if (const auto* c = g->get("check_incoming")) {
      const auto v = c->value<bool>();
      if (!v) invalid("'check_incoming' in [grid] must be a boolean");
      s.check_incoming = *v;
    }
  }
  cfg.tolerances = merge(it->second.tolerances, subtable(root, "tolerances"), "tolerances");
  cfg.options = merge(it->second.options, subtable(root, "options"), "options");
  if (cfg.scenario == "inviscid-shift" && !cfg.tolerances.count("final_shift"))
    cfg.tolerances["final_shift"] =
        std::max(0.05, 3.0 * cfg.grid.dx + 1.5 / std::sqrt(cfg.grid.t_end));
  if (const auto* o = subtable(root, "output")) {
    reject_unknown(*o, {"dir"}, "[output]");
    const auto d = text(*o, "dir", "", "[output]");
    if (!d.empty()) cfg.output_dir = std::filesystem::path(d).is_absolute() ? std::filesystem::path(d) : base_dir / d;
  }
  validate(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) invalid("cannot open " + file.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), file.parent_path(), file.stem().string());
}

void validate(const ExperimentConfig& cfg) {
  if (!defaults().count(cfg.scenario)) invalid("unknown scenario '" + cfg.scenario + "'");
  FluxModel flux = FluxModel::by_name(cfg.flux);
  for (const auto& [k, v] : cfg.tolerances)
    if (!(v > 0.0) || !std::isfinite(v)) invalid("tolerance '" + k + "' must be positive");
  const auto& g = cfg.grid;
  if (!(g.dx > 0.0)) invalid("grid.dx must be positive");
  if (!(g.x_left < 0.0)) invalid("grid.x_left must be negative");
  if (!(g.t_end > 0.0)) invalid("grid.t_end must be positive");
  if (!(g.snapshot_dt > 0.0)) invalid("grid.snapshot_dt must be positive");
  if (g.cfl < 0.0) invalid("grid.cfl must be non-negative");
  if (!(g.delta_b >= 0.0)) invalid("grid.delta_b must be non-negative");
  const double cells = -g.x_left / g.dx;
  if (std::abs(cells - std::round(cells)) > 1e-6 * cells)
    invalid("grid.x_left must be a multiple of grid.dx");

  const auto& b = cfg.boundary;
  const bool boundary_used = !(cfg.scenario == "profile-check" && cfg.u_plus);
  if (b.kind != "constant" && b.kind != "sinusoid" && b.kind != "file")
    invalid("unknown boundary kind '" + b.kind + "'");
  if (!(b.period > 0.0)) invalid("boundary.period must be positive");
  if (b.kind == "file" && b.path.empty()) invalid("boundary.path is required for kind 'file'");
  if (b.kind == "sinusoid" && g.check_incoming && boundary_used) {
    // f' is monotone on the convex fluxes, so the extremes of the sinusoid bound f'(u_b).
    for (double u : {b.mean - std::abs(b.amplitude), b.mean + std::abs(b.amplitude)})
      if (!(flux.d1(u) < -g.delta_b)) {
        std::ostringstream msg;
        msg << "sinusoid reaches u = " << u << " with f'(u) = " << flux.d1(u)
            << ", which is not below -delta_b = " << -g.delta_b;
        invalid(msg.str());
      }
  }
  if (b.kind == "constant" && g.check_incoming && boundary_used && !(flux.d1(b.value) < -g.delta_b))
    invalid("constant boundary value is not incoming");

  static const std::set<std::string> kinds{"constant", "indicator",    "bump",
                                           "sine-mode", "random-bumps", "shock-bump"};
  const auto& i = cfg.initial;
  if (!kinds.count(i.kind)) invalid("unknown initial kind '" + i.kind + "'");
  if (i.kind == "indicator" && !(i.a < i.b)) invalid("indicator needs a < b");
  if ((i.kind == "bump" || i.kind == "shock-bump") && !(i.width > 0.0))
    invalid("bump width must be positive");
  if (i.kind == "random-bumps" && (i.count < 1 || !(i.x_min < i.x_max) || !(i.width > 0.0)))
    invalid("random-bumps needs count >= 1, x_min < x_max, width > 0");
  if (i.kind == "shock-bump" && cfg.scenario != "viscous-coupled")
    invalid("shock-bump initial data is only defined for viscous-coupled");
  if (cfg.scenario == "viscous-coupled" && i.kind != "shock-bump")
    invalid("viscous-coupled needs shock-bump initial data");
  if ((cfg.scenario == "viscous-wave" || cfg.scenario == "viscous-coupled") &&
      b.kind == "file")
    invalid(cfg.scenario + " needs a constant or sinusoid boundary");
}

std::string canonical(const ExperimentConfig& cfg) {
  nlohmann::json j;
  j["schema"] = cfg.schema;
  j["name"] = cfg.name;
  j["scenario"] = cfg.scenario;
  j["flux"] = cfg.flux;
  j["u_minus"] = cfg.u_minus;
  j["u_plus"] = cfg.u_plus ? nlohmann::json(*cfg.u_plus) : nlohmann::json(nullptr);
  j["seed"] = cfg.seed;
  const auto& b = cfg.boundary;
  j["boundary"] = {{"kind", b.kind}, {"value", b.value}, {"mean", b.mean},
                   {"amplitude", b.amplitude}, {"period", b.period}, {"path", b.path}};
  const auto& i = cfg.initial;
  j["initial"] = {{"kind", i.kind},       {"base", i.base},   {"height", i.height},
                  {"a", i.a},             {"b", i.b},         {"center", i.center},
                  {"width", i.width},     {"length", i.length}, {"shift", i.shift},
                  {"count", i.count},     {"x_min", i.x_min}, {"x_max", i.x_max}};
  const auto& g = cfg.grid;
  j["grid"] = {{"x_left", g.x_left},           {"dx", g.dx},
               {"t_end", g.t_end},             {"cfl", g.cfl},
               {"snapshot_dt", g.snapshot_dt}, {"delta_b", g.delta_b},
               {"check_incoming", g.check_incoming}};
  j["tolerances"] = cfg.tolerances;
  j["options"] = cfg.options;
  return j.dump();
}

std::uint64_t config_hash(const ExperimentConfig& cfg) { return fnv1a(canonical(cfg)); }

PeriodicSignal make_signal(const SignalSpec& spec, const std::filesystem::path& base_dir) {
  if (spec.kind == "constant") return PeriodicSignal::constant(spec.value, spec.period);
  if (spec.kind == "sinusoid")
    return PeriodicSignal::sinusoid(spec.mean, spec.amplitude, spec.period);
  if (spec.kind == "file") {
    const std::filesystem::path p =
        std::filesystem::path(spec.path).is_absolute() ? std::filesystem::path(spec.path) : base_dir / spec.path;
    std::ifstream in(p);
    if (!in) invalid("cannot open boundary samples " + p.string());
    std::vector<double> samples;
    std::string line;
    while (std::getline(in, line)) {
      const auto first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos || line[first] == '#') continue;
      try {
        samples.push_back(std::stod(line.substr(first)));
      } catch (const std::exception&) {
        invalid("bad sample '" + line + "' in " + p.string());
      }
    }
    if (samples.size() < 8) invalid("boundary file needs at least 8 samples");
    return PeriodicSignal::from_samples(spec.period, std::move(samples));
  }
  invalid("unknown boundary kind '" + spec.kind + "'");
}

Profile make_initial(const ExperimentConfig& cfg) {
  const InitialSpec s = cfg.initial;
  if (s.kind == "constant") return [v = s.base](double) { return v; };
  if (s.kind == "indicator")
    return [s](double x) { return (x > s.a && x < s.b) ? s.base + s.height : s.base; };
  if (s.kind == "bump")
    return [s](double x) { return s.base + s.height * bump(x, s.center, s.width); };
  if (s.kind == "sine-mode") {
    const double length = s.length > 0.0 ? s.length : -cfg.grid.x_left;
    const double k = 2.0 * std::numbers::pi / length;
    return [s, k](double x) { return s.base + s.height * std::sin(k * x); };
  }
  if (s.kind == "random-bumps") {
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> centre(s.x_min, s.x_max), height(-1.0, 1.0);
    std::vector<std::pair<double, double>> bumps;
    for (int k = 0; k < s.count; ++k) {
      const double c = centre(rng);
      bumps.emplace_back(c, s.height * height(rng));
    }
    return [s, bumps](double x) {
      double v = s.base;
      for (const auto& [c, h] : bumps) v += h * bump(x, c, s.width);
      return v;
    };
  }
  invalid("initial kind '" + s.kind + "' needs the scenario pipeline");
}

}  // namespace tpshock::harness
