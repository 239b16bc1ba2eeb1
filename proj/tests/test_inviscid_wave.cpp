#include <algorithm>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "tpshock/error.hpp"
#include "tpshock/inviscid_wave.hpp"

using namespace tpshock;

namespace {

const FluxModel kBurgers = FluxModel::burgers();
const PeriodicSignal kSine = PeriodicSignal::sinusoid(-1.5, 0.3, 1.0);

// Dense sampling argmax of the exact primitive for the Burgers sinusoid, independent of FFTs.
double divide_time_oracle(double tau0) {
  const double ubar = -std::sqrt(2 * (1.125 + 0.0225));
  const double fplus = 0.5 * ubar * ubar;
  const int n = 200000;
  double prim = 0.0, best = 0.0, arg = 0.0;
  for (int j = 1; j <= n; ++j) {
    const double t = double(j) / n;
    const double u = -1.5 + 0.3 * std::sin(2 * std::numbers::pi * (t - 0.5 / n - tau0));
    prim += (0.5 * u * u - fplus) / n;
    if (prim > best + 1e-15) {
      best = prim;
      arg = t;
    }
  }
  return arg;
}

}  // namespace

TEST_CASE("interchange: constants, closed form and round trip") {
  const auto c = interchange(kBurgers, PeriodicSignal::constant(-1.2));
  CHECK(c.v0(0.3) == doctest::Approx(-0.72));
  CHECK(c.to_state(c.v0(0.3)) == doctest::Approx(-1.2).epsilon(1e-12));

  const auto p = interchange(kBurgers, kSine);
  for (int j = 0; j < 97; ++j) {
    const double t = j / 97.0;
    const double v = p.v0(t);
    CHECK(p.g(v) == doctest::Approx(-std::sqrt(-2 * v)).epsilon(1e-12));
    CHECK(std::abs(p.to_state(v) - kSine(t)) < 1e-10);
    CHECK(p.dg(v) > 0.0);
    CHECK(p.dg(v) < 1.0 / 0.1);
    CHECK(p.d2g(v) > 0.0);
  }
  CHECK_THROWS_AS(interchange(kBurgers, PeriodicSignal::sinusoid(-0.2, 0.3, 1.0)), Error);
}

TEST_CASE("far-field state and constant wave") {
  CHECK(far_field_state(kBurgers, kSine) == doctest::Approx(-1.51493).epsilon(2e-6));
  const auto w = solve_wave(kBurgers, PeriodicSignal::constant(-1.3));
  CHECK(w.u_bar_plus() == doctest::Approx(-1.3));
  CHECK(w(-7.0, 0.4) == doctest::Approx(-1.3).epsilon(1e-12));
  CHECK(w.divide_time() == 0.0);
  const auto d = decay_diagnostic(w, {-10, -20, -40, -60, -100});
  CHECK(d.degenerate);
}

TEST_CASE("flux-average identity") {
  const auto w = solve_wave(kBurgers, kSine);
  const double target = 1.1475;  // mean of (-1.5 + 0.3 sin)^2 / 2
  for (double x : {-5.0, -20.0, -80.0}) CHECK(std::abs(w.flux_average(x) - target) < 1e-6);
}

TEST_CASE("divide time: oracle and translation equivariance") {
  const double tb = divide_time(kBurgers, kSine);
  CHECK(std::abs(tb - divide_time_oracle(0.0)) < 1e-4);
  for (double tau0 : {0.1, 0.37, 0.8}) {
    const double shifted = divide_time(kBurgers, kSine.shifted(tau0));
    double expect = std::fmod(tb + tau0, 1.0);
    double diff = std::abs(shifted - expect);
    diff = std::min(diff, 1.0 - diff);
    CHECK(diff < 1e-8);
  }
  // Divide criterion for the transformed data: the primitive never exceeds its value at t_b.
  const FluxPrimitive prim(kBurgers, kSine, far_field_state(kBurgers, kSine));
  for (int j = 0; j < 4000; ++j) CHECK(prim(tb + j / 4000.0) <= prim(tb) + 1e-12);
  CHECK(kSine(tb) == doctest::Approx(far_field_state(kBurgers, kSine)).epsilon(1e-8));
}

TEST_CASE("divide line carries the far-field state") {
  const auto w = solve_wave(kBurgers, kSine);
  const double ubar = w.u_bar_plus();
  const double tb = w.divide_time();
  for (int n = 0; n < 4; ++n) {
    for (double x : {-3.0, -15.0, -60.0}) {
      const double t = tb + n + x / kBurgers.d1(ubar);
      CHECK(std::abs(w(x, t) - ubar) < 1e-6);
    }
  }
}

TEST_CASE("time periodicity and decay slope") {
  const auto w = solve_wave(kBurgers, kSine);
  for (double x : {-2.0, -30.0})
    for (double t : {0.1, 0.55, 0.9}) CHECK(std::abs(w(x, t) - w(x, t + 1.0)) < 1e-9);

  std::vector<double> probes;
  for (int i = 0; i <= 10; ++i) probes.push_back(-10.0 * std::pow(10.0, i / 10.0));
  const auto d = decay_diagnostic(w, probes);
  REQUIRE_FALSE(d.degenerate);
  CHECK(d.slope > -1.15);
  CHECK(d.slope < -0.85);
  const auto wc = solve_wave(kBurgers, kSine, probes);
  REQUIRE(wc.decay_constant().has_value());
  for (double x : probes) CHECK(wc.sup_deviation(x, 256) <= *wc.decay_constant() / std::abs(x) + 1e-12);
}

TEST_CASE("Lax-Oleinik and Godunov back ends agree") {
  const auto w = solve_wave(kBurgers, kSine);
  const auto p = interchange(kBurgers, kSine);
  const std::vector<double> probes{-1.0, -5.0, -20.0};
  const std::size_t cells = 1024;
  const auto gw = godunov_wave(p, probes, cells);
  for (std::size_t i = 0; i < probes.size(); ++i) {
    double l1 = 0.0;
    for (std::size_t j = 0; j < cells; ++j) {
      const double t = (j + 0.5) / double(cells);
      l1 += std::abs(gw[i][j] - w(probes[i], t)) / double(cells);
    }
    CHECK(l1 < 5e-3);
  }
}

TEST_CASE("quartic flux wave") {
  const auto q = FluxModel::quartic();
  const auto ub = PeriodicSignal::sinusoid(-1.2, 0.2, 2.0);
  const auto w = solve_wave(q, ub);
  double mean = 0.0;
  for (int j = 0; j < 20000; ++j) mean += q(ub(2.0 * (j + 0.5) / 20000)) / 20000;
  CHECK(q(w.u_bar_plus()) == doctest::Approx(mean).epsilon(1e-10));
  CHECK(std::abs(w.flux_average(-10.0) / 2.0 - mean) < 1e-6);
}
