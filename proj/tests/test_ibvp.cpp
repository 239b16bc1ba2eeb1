#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "tpshock/error.hpp"
#include "tpshock/ibvp.hpp"
#include "tpshock/numerics.hpp"

using namespace tpshock;

namespace {

const FluxModel kBurgers = FluxModel::burgers();

double l2_error(const GridSolution& sol, std::size_t snap, const std::function<double(double)>& exact) {
  std::vector<double> sq(sol.x.size());
  for (std::size_t j = 0; j < sq.size(); ++j) {
    const double e = sol.states[snap][j] - exact(sol.x[j]);
    sq[j] = e * e;
  }
  return std::sqrt(trapezoid(sq, sol.dx));
}

double bump(double x, double center, double width) {
  const double r = (x - center) / width;
  return std::abs(r) < 1.0 ? std::pow(std::cos(0.5 * std::numbers::pi * r), 4) : 0.0;
}

struct Background {
  ShockData shock;
  ShockProfile profile;
  SpectralWave wave;
};

Background constant_background(double um, double up) {
  auto shock = make_shock(kBurgers, um, up);
  return {shock, solve_profile(kBurgers, shock),
          solve_periodic_wave(kBurgers, PeriodicSignal::constant(up))};
}

std::vector<double> uniform_nodes(double x_left, double dx) {
  const auto n = std::size_t(std::llround(-x_left / dx));
  std::vector<double> x(n + 1);
  for (std::size_t j = 0; j <= n; ++j) x[j] = x_left + dx * double(j);
  x.back() = 0.0;
  return x;
}

}  // namespace

TEST_CASE("constant state is preserved") {
  ViscousConfig cfg;
  cfg.x_left = -10.0;
  cfg.dx = 0.1;
  cfg.t_end = 5.0;
  cfg.u_left = -1.2;
  const auto sol = solve_viscous(kBurgers, [](double) { return -1.2; }, PeriodicSignal::constant(-1.2), cfg);
  double worst = 0.0;
  for (const auto& s : sol.states)
    for (double v : s) worst = std::max(worst, std::abs(v + 1.2));
  CHECK(worst < 1e-12);
}

TEST_CASE("discrete conservation and envelope with periodic data") {
  for (auto left : {LeftBoundary::Pinned, LeftBoundary::Neumann}) {
    ViscousConfig cfg;
    cfg.x_left = -20.0;
    cfg.dx = 0.05;
    cfg.t_end = 6.0;
    cfg.u_left = -1.5;
    cfg.left = left;
    const auto ub = PeriodicSignal::sinusoid(-1.5, 0.2, 1.0);
    const auto u0 = [](double x) { return -1.5 + 0.6 * bump(x, -8.0, 2.0); };
    const auto sol = solve_viscous(kBurgers, u0, ub, cfg);
    const double dt = sol.step_dt.front();
    CHECK(sol.max_conservation_defect() / dt < 1e-8);
    const double lo = -1.7, hi = -1.5 + 0.6;
    for (const auto& s : sol.states)
      for (double v : s) {
        CHECK(v >= lo - 1e-3);
        CHECK(v <= hi + 1e-3);
      }
  }
}

TEST_CASE("traveling-wave oracle converges at second order") {
  const auto bg = constant_background(0.5, -1.5);
  const double a = -20.0, t_end = 8.0;
  const auto& prof = bg.profile;
  const double s = bg.shock.speed;
  std::vector<double> errors;
  for (double dx : {0.1, 0.05, 0.025}) {
    ViscousConfig cfg;
    cfg.x_left = -70.0;
    cfg.dx = dx;
    cfg.t_end = t_end;
    cfg.snapshot_dt = t_end;
    cfg.u_left = 0.5;
    const auto ub = PeriodicSignal::constant(prof(-a));
    const auto sol = solve_viscous(kBurgers, [&](double x) { return prof(x - a); }, ub, cfg);
    errors.push_back(l2_error(sol, 1, [&](double x) { return prof(x - s * t_end - a); }));
  }
  MESSAGE("L2 errors ", errors[0], " ", errors[1], " ", errors[2]);
  CHECK(errors[2] < 1e-3);
  CHECK(std::log2(errors[0] / errors[1]) > 1.7);
  CHECK(std::log2(errors[1] / errors[2]) > 1.7);
}

TEST_CASE("heat limit matches the separable solution at second order") {
  const double L = 10.0, c = 0.3, k = 2.0 * std::numbers::pi / L, t_end = 1.0;
  auto exact = [&](double x, double t) { return c + std::exp(-k * k * t) * std::sin(k * x); };
  std::vector<double> errors;
  for (double dx : {0.2, 0.1, 0.05}) {
    ViscousConfig cfg;
    cfg.x_left = -L;
    cfg.dx = dx;
    cfg.t_end = t_end;
    cfg.snapshot_dt = t_end;
    cfg.cfl = 0.5;
    cfg.u_left = c;
    cfg.check_incoming = false;
    const auto sol = solve_viscous(FluxModel::zero(), [&](double x) { return exact(x, 0.0); },
                                   PeriodicSignal::constant(c), cfg);
    errors.push_back(l2_error(sol, 1, [&](double x) { return exact(x, t_end); }));
  }
  MESSAGE("heat errors ", errors[0], " ", errors[1], " ", errors[2]);
  CHECK(std::log2(errors[0] / errors[1]) == doctest::Approx(2.0).epsilon(0.1));
  CHECK(std::log2(errors[1] / errors[2]) == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("solver input errors") {
  ViscousConfig cfg;
  cfg.x_left = -10.0;
  cfg.dx = 0.05;
  cfg.t_end = 1.0;
  cfg.u_left = -1.5;
  const auto ub = PeriodicSignal::constant(-1.5);
  const auto u0 = [](double) { return -1.5; };
  auto kind_of = [&](const ViscousConfig& c, const PeriodicSignal& b) {
    try {
      solve_viscous(kBurgers, u0, b, c);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::InvalidArgument;
  };
  auto big_dt = cfg;
  big_dt.dt = 0.02;
  CHECK(kind_of(big_dt, ub) == ErrorKind::CflViolation);
  auto short_domain = cfg;
  short_domain.required_x_left = -20.0;
  CHECK(kind_of(short_domain, ub) == ErrorKind::DomainTooShort);
  CHECK(kind_of(cfg, PeriodicSignal::constant(0.5)) == ErrorKind::IncomingViolated);
}

TEST_CASE("initial shift") {
  const auto bg = constant_background(0.5, -1.5);
  const auto& prof = bg.profile;
  const auto nodes = uniform_nodes(-80.0, 0.05);
  Ansatz ansatz(prof, bg.wave, nodes);

  for (double a : {-30.0, -22.5, -15.0}) {
    const double x0 = initial_shift([&](double x) { return prof(x - a); }, ansatz);
    CHECK(std::abs(x0 - a) < 1e-9);
  }

  // Mass-shift identity: extra mass m far left of the shock moves X0 by -m / [u].
  const double a = -15.0;
  const double m = 0.3 * gauss_legendre_16([](double x) { return bump(x, -60.0, 1.0); }, -61.0, -59.0);
  const double jump = bg.shock.jump();
  const double x0 = initial_shift([&](double x) { return prof(x - a) + 0.3 * bump(x, -60.0, 1.0); },
                                  ansatz);
  CHECK(std::abs(x0 - (a - m / jump)) < 1e-6);

  // Small boundary waves move X0 by O(nu).
  std::vector<double> moves;
  for (double nu : {0.04, 0.02}) {
    const auto wave = solve_periodic_wave(kBurgers, PeriodicSignal::sinusoid(-1.5, nu, 1.0));
    const auto sh = make_shock(kBurgers, 0.5, wave.u_bar_plus());
    const auto p = solve_profile(kBurgers, sh);
    Ansatz with_wave(p, wave, nodes);
    moves.push_back(initial_shift([&](double x) { return prof(x - a); }, with_wave) - a);
  }
  MESSAGE("X0 moves ", moves[0], " ", moves[1]);
  CHECK(std::abs(moves[0]) < 0.5);
  CHECK(std::abs(moves[0]) > std::abs(moves[1]));

  try {
    initial_shift([](double) { return 5.0; }, ansatz);
    FAIL("expected NoRoot");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NoRoot);
  }
}

TEST_CASE("shift rhs groups") {
  const auto bg = constant_background(0.5, -1.5);
  const auto& prof = bg.profile;
  const auto nodes = uniform_nodes(-80.0, 0.05);
  Ansatz ansatz(prof, bg.wave, nodes);
  const double s = bg.shock.speed;

  // Constant wave: groups (ii) and (iii) vanish; the rate decays like the profile tail.
  std::vector<double> where, rates;
  for (double shift : {-8.0, -10.0, -12.0, -14.0, -16.0, -18.0}) {
    const double slope = prof.derivative(-shift);
    const auto r = shift_rhs(kBurgers, ansatz, 0.0, shift, slope);
    CHECK(r.group_ii == 0.0);
    CHECK(r.group_iii == 0.0);
    CHECK(r.denominator == r.unperturbed);
    where.push_back(-shift);
    rates.push_back(std::abs(r.rate));
  }
  const auto fit = fit_semilog(where, rates);
  MESSAGE("tail slope ", fit.slope, " rate_right ", prof.rate_right());
  CHECK(std::abs(-fit.slope / prof.rate_right() - 1.0) < 0.05);

  // Time and shift only enter through s t + X.
  const auto r1 = shift_rhs(kBurgers, ansatz, 2.0, -9.0, 0.01);
  const auto r2 = shift_rhs(kBurgers, ansatz, 0.0, -9.0 + s * 2.0, 0.01);
  CHECK(r1.rate == doctest::Approx(r2.rate).epsilon(1e-12));

  // Sign: a steeper boundary slope than the profile pulls mass out, the shift answers.
  const double slope = prof.derivative(10.0);
  const auto base = shift_rhs(kBurgers, ansatz, 0.0, -10.0, slope);
  const auto more = shift_rhs(kBurgers, ansatz, 0.0, -10.0, slope - 0.01);
  CHECK((more.rate - base.rate) * bg.shock.jump() > 0.0);

  // Large waves make the denominator collapse.
  const auto wave = solve_periodic_wave(kBurgers, PeriodicSignal::sinusoid(-1.5, 0.05, 1.0));
  const auto sh = make_shock(kBurgers, 0.5, wave.u_bar_plus());
  const auto p = solve_profile(kBurgers, sh);
  Ansatz with_wave(p, wave, nodes);
  const auto r = shift_rhs(kBurgers, with_wave, 0.3, -3.0, 0.0);
  CHECK(std::abs(r.denominator - r.unperturbed) < 0.1 * std::abs(r.unperturbed));
  CHECK(r.group_ii != 0.0);
}

TEST_CASE("time-marched periodic wave agrees with the fixed point") {
  const auto ub = PeriodicSignal::sinusoid(-1.5, 0.05, 1.0);
  const auto wave = solve_periodic_wave(kBurgers, ub);
  const auto rep = compare_wave_march(kBurgers, wave, ub, 0.02, 50);
  MESSAGE("L2 ", rep.l2_difference, " sup ", rep.sup_difference, " drift ", rep.period_drift);
  CHECK(rep.l2_difference <= 5e-3);
  CHECK(rep.period_drift < 1e-6);
}

TEST_CASE("coupled run: matched constant data keeps the shift") {
  const auto bg = constant_background(0.5, -1.5);
  CoupledConfig cfg;
  cfg.grid.x_left = -90.0;
  cfg.grid.dx = 0.05;
  cfg.grid.t_end = 20.0;
  const double a = -15.0;
  const auto& prof = bg.profile;
  const auto res = run_coupled(kBurgers, [&](double x) { return prof(x - a); },
                               PeriodicSignal::constant(prof(-a)), prof, bg.wave, cfg);
  double drift = 0.0;
  for (double x : res.shift.shift) drift = std::max(drift, std::abs(x - a));
  MESSAGE("shift drift ", drift, " max defect ", res.verdict.max_defect);
  CHECK(std::abs(res.shift.x0 - a) < 1e-9);
  CHECK(drift < 1e-5);
  CHECK(res.verdict.max_defect < 1e-8);
}

TEST_CASE("coupled run: constant boundary with a compact perturbation") {
  const auto bg = constant_background(0.5, -1.5);
  const auto& prof = bg.profile;
  CoupledConfig cfg;
  cfg.grid.x_left = -100.0;
  cfg.grid.t_end = 40.0;
  const double a = -15.0;
  const auto res = run_coupled(kBurgers, [&](double x) { return prof(x - a) + 0.2 * bump(x, a - 4.0, 2.0); },
                               PeriodicSignal::constant(-1.5), prof, bg.wave, cfg);
  const auto& v = res.verdict;
  MESSAGE("X0 ", res.shift.x0, " X(end) ", res.shift.shift.back(), " gap ", v.gap_initial, " -> ",
          v.gap_final, " defect ", v.max_defect);
  CHECK(v.pass());
  const double m = 0.2 * gauss_legendre_16([](double x) { return bump(x, 0.0, 2.0); }, -2.0, 2.0);
  CHECK(std::abs(res.shift.x0 - (a - m / bg.shock.jump())) < 1e-3);

  // |X'| envelope per unit time decays exponentially once the perturbation is absorbed.
  std::vector<double> t, env;
  const auto& ts = res.shift.times;
  for (int k = 5; k < 40; ++k) {
    double peak = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i)
      if (ts[i] > k && ts[i] <= k + 1) peak = std::max(peak, std::abs(res.shift.rate[i]));
    if (peak > 1e-12) {
      t.push_back(k + 0.5);
      env.push_back(peak);
    }
  }
  const auto fit = fit_semilog(t, env);
  MESSAGE("log |X'| slope ", fit.slope, " r2 ", fit.r_squared, " points ", t.size());
  CHECK(fit.slope < 0.0);
}

TEST_CASE("coupled run: periodic boundary, short horizon") {
  const auto ub = PeriodicSignal::sinusoid(-1.5, 0.05, 1.0);
  const auto wave = solve_periodic_wave(kBurgers, ub);
  const auto sh = make_shock(kBurgers, 0.5, wave.u_bar_plus());
  const auto prof = solve_profile(kBurgers, sh);
  CoupledConfig cfg;
  cfg.grid.x_left = -100.0;
  cfg.grid.t_end = 30.0;
  const double a = -15.0;
  const auto nodes = uniform_nodes(cfg.grid.x_left, cfg.grid.dx);
  Ansatz ansatz(prof, wave, nodes);
  std::vector<double> sharp;
  ansatz.evaluate(0.0, a, sharp);
  const auto data = [&](double x) {
    const auto j = std::size_t(std::llround((x - cfg.grid.x_left) / cfg.grid.dx));
    return sharp[std::min(j, sharp.size() - 1)] + 0.2 * bump(x, a - 5.0, 2.0);
  };
  const auto res = run_coupled(kBurgers, data, ub, prof, wave, cfg);
  const auto& v = res.verdict;
  MESSAGE("X0 ", res.shift.x0, " X(end) ", res.shift.shift.back(), " change ", v.shift_change,
          " gap ", v.gap_initial, " -> ", v.gap_final, " defect ", v.max_defect, " bound ",
          v.drift_bound, " ansatz slope ", v.ansatz_gap_slope, " r2 ", v.ansatz_gap_r2);
  CHECK(v.pass());
  CHECK(v.ansatz_gap_linear);
  CHECK(v.ansatz_gap_slope == doctest::Approx(sh.speed * prof.rate_left()).epsilon(0.05));

  // Anti-derivative: both ends carry the mass defect bound.
  REQUIRE(res.anti.right.size() == res.superposition_gap.size());
  for (std::size_t i = 0; i < res.anti.right.size(); ++i) {
    CHECK(res.anti.left[i] == 0.0);
    CHECK(std::abs(res.anti.right[i]) <= v.drift_bound);
  }

  // The stencil form of the boundary slope does not balance the discrete mass.
  auto stencil = cfg;
  stencil.scheme_boundary_flux = false;
  stencil.grid.t_end = 10.0;
  const auto alt = run_coupled(kBurgers, data, ub, prof, wave, stencil);
  MESSAGE("stencil defect ", alt.verdict.max_defect);
  CHECK(alt.verdict.max_defect > v.max_defect);
}

TEST_CASE("coupled run input errors") {
  const auto bg = constant_background(0.5, -1.5);
  const auto& prof = bg.profile;
  const auto u0 = [&](double x) { return prof(x + 15.0); };
  const auto ub = PeriodicSignal::constant(-1.5);
  auto kind_of = [&](const CoupledConfig& c) {
    try {
      run_coupled(kBurgers, u0, ub, prof, bg.wave, c);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::InvalidArgument;
  };
  CoupledConfig cfg;
  cfg.grid.x_left = -60.0;
  cfg.grid.t_end = 100.0;
  CHECK(kind_of(cfg) == ErrorKind::DomainTooShort);
  cfg.grid.t_end = 1.0;
  cfg.grid.x_left = -90.0;
  cfg.grid.dx = 0.1;
  CHECK(kind_of(cfg) == ErrorKind::InvalidArgument);
}
