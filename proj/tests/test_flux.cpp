#include <cmath>
#include <random>

#include "doctest.h"
#include "tpshock/error.hpp"
#include "tpshock/flux.hpp"

using namespace tpshock;

namespace {

// Plain bisection for f(u) = y on a decreasing branch; independent of the library's Newton path.
double bisect_decreasing(const FluxModel& f, double y, double lo, double hi) {
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) > y) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("flux invariants: convexity and derivative consistency") {
  for (const auto& f : {FluxModel::burgers(), FluxModel::quartic()}) {
    const auto dom = f.domain_hint();
    const double h = 1e-4;
    for (int i = 0; i <= 400; ++i) {
      const double u = dom.lo + dom.width() * i / 400.0;
      CHECK(f.d2(u) > 0.0);
      const double fd = (f(u + h) - f(u - h)) / (2 * h);
      CHECK(std::abs(fd - f.d1(u)) < 1e-6 * (1 + std::abs(f.d1(u))));
    }
  }
  CHECK_THROWS_AS(FluxModel::by_name("cubic"), Error);
  CHECK(FluxModel::by_name("quartic").name() == "quartic");
}

TEST_CASE("shock_speed examples") {
  const auto b = FluxModel::burgers();
  CHECK(shock_speed(b, 0.5, -1.5) == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(shock_speed(b, 1.0, -1.0) == doctest::Approx(0.0));
  CHECK(shock_speed(b, 0.0, -2.0) == doctest::Approx(-1.0).epsilon(1e-15));
  try {
    shock_speed(b, 0.3, 0.3);
    FAIL("expected EqualStates");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::EqualStates);
  }
}

TEST_CASE("check_lax examples") {
  const auto b = FluxModel::burgers();
  CHECK(check_lax(b, make_shock(b, 0.5, -1.5)));
  const double eps = 1e-13;
  CHECK_FALSE(check_lax(b, ShockData{1.0, 1.0 - eps, 1.0 - 0.5 * eps}));
  CHECK_FALSE(check_lax(b, make_shock(b, -1.0, 1.0)));
}

TEST_CASE("oleinik_f0 examples and anchor agreement") {
  const auto b = FluxModel::burgers();
  const auto sh = make_shock(b, 0.5, -1.5);
  CHECK(oleinik_f0(b, sh, -0.5) == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(oleinik_f0(b, sh, -1.5) == doctest::Approx(0.0));
  CHECK(std::abs(oleinik_f0(b, sh, 0.5)) < 1e-15);

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dist(-3.0, 3.0);
  for (const auto& f : {FluxModel::burgers(), FluxModel::quartic()}) {
    for (int i = 0; i < 200; ++i) {
      double a = dist(rng), c = dist(rng);
      if (std::abs(a - c) < 1e-3) continue;
      const auto s = make_shock(f, a, c);
      const double phi = dist(rng);
      CHECK(std::abs(oleinik_f0(f, s, phi, Anchor::Plus) - oleinik_f0(f, s, phi, Anchor::Minus)) <
            1e-12 * (1 + std::abs(f(phi))));
    }
  }
}

TEST_CASE("averaged_speed examples and monotonicity") {
  const auto b = FluxModel::burgers();
  CHECK(averaged_speed(b, 1.0, -1.0) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(averaged_speed(b, 0.5, -1.5) == doctest::Approx(-0.5).epsilon(1e-14));
  const auto q = FluxModel::quartic();
  CHECK(averaged_speed(q, 0.7, 0.7) == doctest::Approx(q.d1(0.7)).epsilon(1e-14));

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> dist(-3.0, 3.0);
  for (const auto& f : {FluxModel::burgers(), FluxModel::quartic()}) {
    for (int i = 0; i < 300; ++i) {
      double u = dist(rng), v = dist(rng);
      if (u > v) std::swap(u, v);
      if (v - u < 1e-6) continue;
      const double mid = u + (v - u) * std::uniform_real_distribution<double>(0, 1)(rng);
      // For u < v: f'(u) <= varpi(v, u) <= f'(v), and varpi(v, u) <= varpi(v, s) for s in [u, v].
      const double w = averaged_speed(f, v, u);
      CHECK(f.d1(u) <= w + 1e-12);
      CHECK(w <= f.d1(v) + 1e-12);
      CHECK(w <= averaged_speed(f, v, mid) + 1e-12);
      CHECK(w == doctest::Approx(shock_speed(f, v, u)).epsilon(1e-12));
      // symmetry of the Rankine-Hugoniot speed
      CHECK(shock_speed(f, u, v) == doctest::Approx(shock_speed(f, v, u)).epsilon(1e-15));
    }
  }
}

TEST_CASE("inverse_on_incoming_branch examples") {
  const auto b = FluxModel::burgers();
  CHECK(inverse_on_incoming_branch(b, 1.125, {-3.0, -0.1}) == doctest::Approx(-1.5).epsilon(1e-12));
  CHECK(inverse_on_incoming_branch(b, 0.125, {-3.0, -0.1}) == doctest::Approx(-0.5).epsilon(1e-12));
  const double oracle = bisect_decreasing(b, 2.295 / 2, -3.0, -0.1);
  CHECK(oracle == doctest::Approx(-1.51493).epsilon(1e-5));
  CHECK(std::abs(inverse_on_incoming_branch(b, 2.295 / 2, {-3.0, -0.1}) - oracle) < 1e-12);

  const auto q = FluxModel::quartic();
  const double uq = inverse_on_incoming_branch(q, 1.0, {-3.0, -0.1});
  CHECK(std::abs(uq - bisect_decreasing(q, 1.0, -3.0, -0.1)) < 1e-12);

  try {
    inverse_on_incoming_branch(b, 10.0, {-3.0, -0.1});
    FAIL("expected NoBracket");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NoBracket);
  }
  try {
    inverse_on_incoming_branch(b, 0.1, {-1.0, 1.0});
    FAIL("expected NotMonotone");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotMonotone);
  }
}
