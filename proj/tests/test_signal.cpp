#include <cmath>
#include <numbers>

#include "doctest.h"
#include "tpshock/numerics.hpp"
#include "tpshock/signal.hpp"

using namespace tpshock;

TEST_CASE("periodic signal reconstructs band-limited data") {
  const double T = 2.0;
  const double w = 2 * std::numbers::pi / T;
  auto fn = [&](double t) { return -1.5 + 0.3 * std::sin(w * t) - 0.1 * std::cos(3 * w * t); };
  const auto s = PeriodicSignal::from_function(T, fn, 256, 64);
  CHECK(s.mean() == doctest::Approx(-1.5).epsilon(1e-14));
  CHECK(s.coefficient(0).real() == doctest::Approx(s.mean()));
  for (double t : {0.0, 0.123, 0.77, 1.5, 3.9}) {
    CHECK(std::abs(s(t) - fn(t)) < 1e-10);
    const double d = 0.3 * w * std::cos(w * t) + 0.3 * w * std::sin(3 * w * t);
    CHECK(std::abs(s.derivative(t) - d) < 1e-9);
  }
  // c_1 of 0.3 sin = -0.15 i
  CHECK(std::abs(s.coefficient(1) - cplx(0, -0.15)) < 1e-14);
  CHECK(std::abs(s.coefficient(-1) - cplx(0, 0.15)) < 1e-14);
  const auto sh = s.shifted(0.3);
  CHECK(std::abs(sh(1.0) - fn(0.7)) < 1e-10);
}

TEST_CASE("constant signal and synthesis round trip") {
  const auto c = PeriodicSignal::constant(-2.0);
  CHECK(c(0.37) == doctest::Approx(-2.0));
  CHECK(c.hm_norm_of_oscillation(1) == 0.0);

  std::vector<double> x(64);
  for (std::size_t j = 0; j < x.size(); ++j) x[j] = std::sin(0.3 * j) + 0.01 * j * (64 - j);
  const auto coeffs = real_fourier(x);
  const auto back = real_synthesis(coeffs, x.size());
  for (std::size_t j = 0; j < x.size(); ++j) CHECK(std::abs(back[j] - x[j]) < 1e-12);
}

TEST_CASE("numerics helpers") {
  CHECK(simpson([](double x) { return x * x * x; }, 0.0, 2.0, 10) == doctest::Approx(4.0));
  CHECK(golden_minimize([](double x) { return (x - 0.3) * (x - 0.3); }, -1, 1) ==
        doctest::Approx(0.3).epsilon(1e-9));
  CHECK(adaptive_integral([](double x) { return x < 0.25 ? 1.0 : 0.0; }, 0, 1, 1e-10) ==
        doctest::Approx(0.25).epsilon(1e-8));
  std::vector<double> xs, ys;
  for (int i = 1; i <= 10; ++i) {
    xs.push_back(i);
    ys.push_back(3.0 * std::pow(i, -0.5));
  }
  const auto fit = fit_loglog(xs, ys);
  CHECK(fit.slope == doctest::Approx(-0.5));
  CHECK(fit.r_squared == doctest::Approx(1.0));
  CHECK_THROWS(fit_line({1, 2, 3}, {1, 2, 3}));

  // 3x3 tridiagonal
  std::vector<double> lo{0, 1, 1}, di{4, 4, 4}, up{1, 1, 0}, rhs{5, 6, 5};
  solve_tridiagonal(lo, di, up, rhs);
  for (double v : rhs) CHECK(v == doctest::Approx(1.0));
}
