#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "tpshock/error.hpp"
#include "tpshock/harness.hpp"

using namespace tpshock;
using namespace tpshock::harness;
namespace fs = std::filesystem;

namespace {

const char* kShift = R"(
schema = 1
scenario = "inviscid-shift"
flux = "burgers"
u_minus = 0.5
[boundary]
kind = "constant"
value = -1.5
[initial]
kind = "constant"
base = 0.5
[grid]
x_left = -30.0
dx = 0.05
t_end = 10.0
snapshot_dt = 0.5
)";

ErrorKind kind_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::InvalidArgument;
}

std::string with(const std::string& base, const std::string& from, const std::string& to) {
  std::string s = base;
  const auto pos = s.find(from);
  REQUIRE(pos != std::string::npos);
  s.replace(pos, from.size(), to);
  return s;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("tpshock_test_harness_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("config: defaults are merged and the final-shift tolerance follows the grid") {
  const auto cfg = parse_config(kShift, {}, "shift");
  CHECK(cfg.name == "shift");
  CHECK(cfg.tolerances.at("conservation") == 1e-10);
  CHECK(cfg.tolerances.at("final_shift") == doctest::Approx(std::max(0.05, 0.15 + 1.5 / std::sqrt(10.0))));
  CHECK(cfg.options.at("decay") == 0.0);
  const auto tuned = parse_config(std::string(kShift) + "[tolerances]\nfinal_shift = 0.1\n");
  CHECK(tuned.tolerances.at("final_shift") == 0.1);
}

TEST_CASE("config: invalid input is rejected") {
  const std::string s = kShift;
  CHECK(kind_of(with(s, "schema = 1", "schema = 2")) == ErrorKind::ConfigInvalid);
  CHECK(kind_of(with(s, "schema = 1", "")) == ErrorKind::ConfigInvalid);
  CHECK(kind_of(with(s, "inviscid-shift", "no-such-scenario")) == ErrorKind::ConfigInvalid);
  CHECK(kind_of(with(s, "flux = \"burgers\"", "flux = \"cubic\"")) == ErrorKind::ConfigInvalid);
  CHECK(kind_of(s + "[tolerances]\nconservation = -1.0\n") == ErrorKind::ConfigInvalid);
  CHECK(kind_of(s + "[tolerances]\nunknown = 1.0\n") == ErrorKind::ConfigInvalid);
  CHECK(kind_of(with(s, "u_minus = 0.5", "u_minus = 0.5\ncolour = 1")) == ErrorKind::ConfigInvalid);
  CHECK(kind_of(with(s, "dx = 0.05", "dx = 0.07")) == ErrorKind::ConfigInvalid);
  CHECK(kind_of(with(s, "dx = 0.05", "dx = \"fine\"")) == ErrorKind::ConfigInvalid);
  CHECK(kind_of(with(s, "value = -1.5", "value = 0.5")) == ErrorKind::ConfigInvalid);
  CHECK(kind_of(with(s, "kind = \"constant\"\nvalue = -1.5",
                     "kind = \"sinusoid\"\nmean = -0.5\namplitude = 0.45")) ==
        ErrorKind::ConfigInvalid);
  CHECK(kind_of(with(s, "kind = \"constant\"\nbase = 0.5",
                     "kind = \"indicator\"\nbase = 0.5\na = -1.0\nb = -2.0")) ==
        ErrorKind::ConfigInvalid);
  CHECK(kind_of(with(s, "kind = \"constant\"\nbase = 0.5", "kind = \"shock-bump\"")) ==
        ErrorKind::ConfigInvalid);
  CHECK(kind_of("schema = 1\nscenario = [") == ErrorKind::ConfigInvalid);
}

TEST_CASE("config hash: stable, order independent, sensitive to values") {
  const auto a = parse_config(kShift);
  const std::string reordered = R"(
scenario = "inviscid-shift"
schema = 1
u_minus = 0.5
flux = "burgers"
[grid]
dx = 0.05
x_left = -30.0
snapshot_dt = 0.5
t_end = 10.0
[initial]
base = 0.5
kind = "constant"
[boundary]
value = -1.5
kind = "constant"
)";
  const auto b = parse_config(reordered);
  CHECK(canonical(a) == canonical(b));
  CHECK(config_hash(a) == config_hash(b));
  auto c = a;
  c.seed = 1;
  CHECK(config_hash(c) != config_hash(a));
  auto d = a;
  d.grid.dx = 0.025;
  CHECK(config_hash(d) != config_hash(a));
}

TEST_CASE("boundary file samples reproduce the signal") {
  const auto dir = scratch("file");
  fs::create_directories(dir);
  {
    std::ofstream out(dir / "ub.txt");
    out.precision(17);
    out << "# one period\n";
    for (int j = 0; j < 64; ++j) out << -1.5 + 0.2 * std::sin(2.0 * M_PI * j / 64.0) << "\n";
  }
  SignalSpec spec;
  spec.kind = "file";
  spec.path = "ub.txt";
  const auto sig = make_signal(spec, dir);
  const auto ref = PeriodicSignal::sinusoid(-1.5, 0.2, 1.0);
  for (double t : {0.0, 0.13, 0.5, 0.77}) CHECK(sig(t) == doctest::Approx(ref(t)).epsilon(1e-9));
  spec.path = "missing.txt";
  CHECK_THROWS_AS(make_signal(spec, dir), Error);
}

TEST_CASE("random bumps are a function of the seed") {
  auto cfg = parse_config(with(kShift, "kind = \"constant\"\nbase = 0.5",
                               "kind = \"random-bumps\"\nbase = 0.5\nheight = 0.3\nwidth = 1.5\n"
                               "count = 5\nx_min = -25.0\nx_max = -5.0"));
  cfg.seed = 11;
  const auto f = make_initial(cfg), g = make_initial(cfg);
  cfg.seed = 12;
  const auto h = make_initial(cfg);
  double same = 0.0, diff = 0.0;
  for (double x = -30.0; x <= 0.0; x += 0.01) {
    same = std::max(same, std::abs(f(x) - g(x)));
    diff = std::max(diff, std::abs(f(x) - h(x)));
    CHECK(std::abs(f(x) - 0.5) <= 5 * 0.3 + 1e-12);
  }
  CHECK(same == 0.0);
  CHECK(diff > 1e-3);
}

TEST_CASE("inviscid-shift: matched constant data stays at zero shift") {
  auto cfg = parse_config(kShift);
  const auto r = run_scenario(cfg);
  REQUIRE(r.error.empty());
  CHECK(r.pass());
  CHECK(std::abs(r.metrics.at("measured_final_shift")) <= 2 * cfg.grid.dx);
  CHECK(r.metrics.at("predicted_final_shift") == doctest::Approx(0.0));
}

TEST_CASE("inviscid-shift: a perturbation of mass a shifts by -a/[u]") {
  const double a = 0.4;
  auto cfg = parse_config(with(kShift, "kind = \"constant\"\nbase = 0.5",
                               "kind = \"indicator\"\nbase = 0.5\nheight = 0.4\na = -3.0\nb = -2.0"));
  const auto r = run_scenario(cfg);
  REQUIRE(r.error.empty());
  // Simpson across the indicator jumps is accurate to O(h).
  CHECK(r.metrics.at("predicted_final_shift") == doctest::Approx(-a / (-1.5 - 0.5)).epsilon(1e-3));
  CHECK(r.pass());
}

TEST_CASE("profile-check on the Burgers tanh oracle") {
  const auto cfg = parse_config(
      "schema = 1\nscenario = \"profile-check\"\nflux = \"burgers\"\nu_minus = 0.5\nu_plus = -1.5\n");
  const auto r = run_scenario(cfg);
  CHECK(r.pass());
  bool found = false;
  for (const auto& c : r.checks)
    if (c.name == "tanh_sup_error") {
      found = true;
      CHECK(c.measured < 1e-8);
    }
  CHECK(found);
}

TEST_CASE("module errors end the run as a failed result") {
  const auto cfg = parse_config(with(kShift, "t_end = 10.0", "t_end = 10.0\ncfl = 1.5"));
  const auto r = run_scenario(cfg);
  CHECK_FALSE(r.pass());
  CHECK(r.error.find("CflViolation") != std::string::npos);
}

TEST_CASE("identical config and seed give byte-identical artifacts") {
  auto cfg = parse_config(with(kShift, "kind = \"constant\"\nbase = 0.5",
                               "kind = \"random-bumps\"\nbase = 0.5\nheight = 0.3\nwidth = 1.5\n"
                               "count = 4\nx_min = -25.0\nx_max = -10.0"));
  cfg.seed = 5;
  const auto d1 = scratch("det1"), d2 = scratch("det2");
  cfg.output_dir = d1;
  const auto r1 = run_scenario(cfg);
  cfg.output_dir = d2;
  const auto r2 = run_scenario(cfg);
  REQUIRE(r1.artifacts == r2.artifacts);
  REQUIRE_FALSE(r1.artifacts.empty());
  for (const auto& f : r1.artifacts) CHECK(slurp(d1 / f) == slurp(d2 / f));
  CHECK(fs::exists(d1 / "result.json"));
  const auto json = slurp(d1 / "result.json");
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(config_hash(cfg)));
  CHECK(json.find(hex) != std::string::npos);
}

TEST_CASE("write_csv rejects ragged columns and round-trips doubles") {
  const auto dir = scratch("csv");
  CHECK_THROWS_AS(write_csv(dir / "a.csv", {"x", "y"}, {{1.0, 2.0}, {1.0}}), Error);
  CHECK_THROWS_AS(write_csv(dir / "a.csv", {"x"}, {{1.0}, {1.0}}), Error);
  const double v = 0.1 + 0.2;
  write_csv(dir / "b.csv", {"v"}, {{v}});
  std::ifstream in(dir / "b.csv");
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  CHECK(header == "v");
  CHECK(std::stod(row) == v);
}

TEST_CASE("convergence: heat limit is second order against the separable solution") {
  const auto cfg = parse_config(R"(
schema = 1
scenario = "viscous-ibvp"
flux = "zero"
u_minus = 0.3
[boundary]
kind = "constant"
value = 0.3
[initial]
kind = "sine-mode"
base = 0.3
height = 1.0
[grid]
x_left = -10.0
dx = 0.2
t_end = 1.0
snapshot_dt = 1.0
cfl = 0.5
check_incoming = false
)");
  const auto r = convergence_study(cfg, 3);
  CHECK(r.diagnostic == "exact-l2");
  REQUIRE(r.orders.size() == 2);
  CHECK(r.observed_order >= 1.8);
  CHECK(r.observed_order <= 2.2);
  CHECK(r.pass());
  CHECK_THROWS_AS(convergence_study(cfg, 2), Error);
}

TEST_CASE("convergence: Godunov on a smooth boundary signal is first order") {
  const auto cfg = parse_config(R"(
schema = 1
scenario = "inviscid-shift"
flux = "burgers"
u_minus = -1.5
[boundary]
kind = "sinusoid"
mean = -1.5
amplitude = 0.05
[initial]
kind = "constant"
base = -1.5
[grid]
x_left = -10.0
dx = 0.02
t_end = 3.0
snapshot_dt = 0.5
)");
  const auto r = convergence_study(cfg, 3);
  CHECK(r.diagnostic == "successive-l1");
  REQUIRE(r.errors.size() == 2);
  CHECK(r.observed_order >= 0.8);
  CHECK(r.observed_order <= 1.2);
}

TEST_CASE("convergence: exact data give no decreasing errors") {
  auto cfg = parse_config(with(kShift, "u_minus = 0.5", "u_minus = -1.5"));
  cfg.initial.base = -1.5;
  CHECK_THROWS_WITH_AS(convergence_study(cfg, 3), doctest::Contains("NonMonotoneErrors"), Error);
  auto other = parse_config(
      "schema = 1\nscenario = \"profile-check\"\nu_minus = 0.5\nu_plus = -1.5\n");
  CHECK_THROWS_AS(convergence_study(other, 3), Error);
}

TEST_CASE("suite keeps input order and isolates failures") {
  auto ok = parse_config(kShift, {}, "ok");
  auto prof = parse_config(
      "schema = 1\nscenario = \"profile-check\"\nu_minus = 0.5\nu_plus = -1.5\n", {}, "prof");
  auto bad = parse_config(with(kShift, "t_end = 10.0", "t_end = 10.0\ncfl = 1.5"), {}, "bad");
  const auto root = scratch("suite");
  ok.output_dir = root / "ok";
  prof.output_dir = root / "prof";
  bad.output_dir = root / "bad";
  const auto res = run_suite({ok, prof, bad}, 3);
  REQUIRE(res.results.size() == 3);
  CHECK(res.results[0].name == "ok");
  CHECK(res.results[1].name == "prof");
  CHECK(res.results[2].name == "bad");
  CHECK(res.results[0].pass());
  CHECK(res.results[1].pass());
  CHECK_FALSE(res.results[2].pass());
  CHECK_FALSE(res.pass());
  CHECK(fs::exists(root / "prof" / "profile.csv"));
}

TEST_CASE("load_suite reads every toml in a directory, sorted") {
  const auto dir = scratch("load");
  fs::create_directories(dir);
  std::ofstream(dir / "b.toml") << kShift;
  std::ofstream(dir / "a.toml") << "schema = 1\nscenario = \"profile-check\"\nu_minus = 0.5\nu_plus = -1.5\n";
  std::ofstream(dir / "notes.txt") << "ignored";
  const auto cfgs = load_suite(dir);
  REQUIRE(cfgs.size() == 2);
  CHECK(cfgs[0].name == "a");
  CHECK(cfgs[1].name == "b");
  CHECK_THROWS_AS(load_suite(dir / "nothing"), Error);
}
