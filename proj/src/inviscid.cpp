#include "tpshock/inviscid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "tpshock/error.hpp"
#include "tpshock/inviscid_wave.hpp"
#include "tpshock/numerics.hpp"

namespace tpshock {

double GridSolution::max_conservation_defect() const {
  double worst = 0.0;
  for (std::size_t n = 0; n < step_dt.size(); ++n) {
    const double predicted = step_dt[n] * (left_flux_trace[n] - flux_trace[n]);
    worst = std::max(worst, std::abs(mass[n + 1] - mass[n] - predicted));
  }
  return worst;
}

double godunov_flux(const FluxModel& flux, double a, double b) {
  if (a <= b) {
    const double sonic = flux.sonic_point().value_or(a);
    return flux(std::clamp(sonic, a, b));
  }
  return std::max(flux(a), flux(b));
}

void check_incoming(const FluxModel& flux, const PeriodicSignal& ub, double delta_b, int samples) {
  for (int j = 0; j < samples; ++j) {
    const double t = ub.period() * j / samples;
    if (flux.d1(ub(t)) >= -delta_b) {
      std::ostringstream os;
      os << "f'(u_b(" << t << ")) = " << flux.d1(ub(t)) << " >= -" << delta_b;
      throw Error(ErrorKind::IncomingViolated, os.str());
    }
  }
}

GridSolution solve_inviscid(const FluxModel& flux, const Profile& u0, const PeriodicSignal& ub,
                            const InviscidConfig& cfg) {
  if (!flux.convex() || !flux.sonic_point())
    throw Error(ErrorKind::InvalidArgument, "inviscid solver needs a convex flux");
  if (cfg.cfl > 0.9 || cfg.cfl <= 0.0)
    throw Error(ErrorKind::CflViolation, "CFL number must lie in (0, 0.9]");
  if (cfg.right == RightBoundary::Signal)
    check_incoming(flux, ub, cfg.delta_b, cfg.incoming_samples);

  const double length = cfg.x_right - cfg.x_left;
  const auto n = static_cast<std::size_t>(std::llround(length / cfg.dx));
  if (n < 2 || std::abs(n * cfg.dx - length) > 1e-9 * length)
    throw Error(ErrorKind::InvalidArgument, "domain length must be a multiple of dx");

  GridSolution sol;
  sol.x_left = cfg.x_left;
  sol.dx = cfg.dx;
  sol.x.resize(n);
  std::vector<double> u(n);
  // Cell averages by 4-point Gauss on each cell.
  static constexpr double gp[4] = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                                   0.8611363115940526};
  static constexpr double gw[4] = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                                   0.3478548451374538};
  for (std::size_t j = 0; j < n; ++j) {
    sol.x[j] = cfg.x_left + (double(j) + 0.5) * cfg.dx;
    double avg = 0.0;
    for (int q = 0; q < 4; ++q) avg += 0.5 * gw[q] * u0(sol.x[j] + 0.5 * cfg.dx * gp[q]);
    u[j] = avg;
    if (cfg.require_incoming_initial && flux.d1(u[j]) >= 0.0) {
      std::ostringstream os;
      os << "f'(u0(" << sol.x[j] << ")) >= 0";
      throw Error(ErrorKind::IncomingViolated, os.str());
    }
  }

  auto mass_of = [&](const std::vector<double>& w) {
    double m = 0.0;
    for (double v : w) m += v;
    return m * cfg.dx;
  };
  double data_lo = std::min({*std::min_element(u.begin(), u.end()), cfg.u_left}),
         data_hi = std::max({*std::max_element(u.begin(), u.end()), cfg.u_left});
  if (cfg.right == RightBoundary::Signal) {
    data_lo = std::min(data_lo, ub.min_sample());
    data_hi = std::max(data_hi, ub.max_sample());
  }
  const double data_range = data_hi - data_lo;

  sol.times.push_back(0.0);
  sol.states.push_back(u);
  sol.mass.push_back(mass_of(u));

  std::vector<double> fluxes(n + 1);
  double t = 0.0;
  double next_snapshot = cfg.snapshot_dt;
  const double eps_t = 1e-12 * std::max(1.0, cfg.t_end);
  while (t < cfg.t_end - eps_t) {
    double smax = std::abs(flux.d1(cfg.u_left));
    for (double v : u) smax = std::max(smax, std::abs(flux.d1(v)));
    if (cfg.right == RightBoundary::Signal)
      smax = std::max({smax, std::abs(flux.d1(ub.min_sample())), std::abs(flux.d1(ub.max_sample()))});
    double dt = cfg.cfl * cfg.dx / std::max(smax, 1e-12);
    dt = std::min({dt, cfg.t_end - t, next_snapshot - t});
    if (dt <= 0.0) dt = std::min(cfg.t_end - t, cfg.cfl * cfg.dx / std::max(smax, 1e-12));

    const double ghost_right =
        cfg.right == RightBoundary::Signal ? ub(t + 0.5 * dt) : u.back();
    fluxes[0] = godunov_flux(flux, cfg.u_left, u.front());
    for (std::size_t j = 1; j < n; ++j) fluxes[j] = godunov_flux(flux, u[j - 1], u[j]);
    fluxes[n] = godunov_flux(flux, u.back(), ghost_right);

    const double lambda = dt / cfg.dx;
    for (std::size_t j = 0; j < n; ++j) u[j] -= lambda * (fluxes[j + 1] - fluxes[j]);
    t += dt;

    sol.step_times.push_back(t);
    sol.step_dt.push_back(dt);
    sol.boundary_trace.push_back(u.back());
    sol.flux_trace.push_back(fluxes[n]);
    sol.left_flux_trace.push_back(fluxes[0]);
    sol.mass.push_back(mass_of(u));

    if (t >= next_snapshot - eps_t || t >= cfg.t_end - eps_t) {
      sol.times.push_back(t);
      sol.states.push_back(u);
      next_snapshot += cfg.snapshot_dt;
      // The left edge must stay near u_left.
      const std::size_t m = std::min<std::size_t>(cfg.edge_margin_cells, n);
      for (std::size_t j = 0; j < m; ++j)
        if (std::abs(u[j] - cfg.u_left) > 0.25 * data_range + 1e-12) {
          std::ostringstream os;
          os << "transition within " << cfg.edge_margin_cells << " cells of x_left at t=" << t;
          throw Error(ErrorKind::DomainTooShort, os.str());
        }
    }
  }
  return sol;
}

double locate_shock(const GridSolution& sol, const std::vector<double>& u,
                    const ShockData& shock) {
  const double mid = 0.5 * (shock.u_minus + shock.u_plus);
  const double sign = shock.u_minus > shock.u_plus ? 1.0 : -1.0;
  // Running integral of sign * (u - mid); the interface sits at its maximum.
  double run = 0.0, best = -std::numeric_limits<double>::infinity();
  std::size_t arg = 0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    run += sign * (u[j] - mid) * sol.dx;
    if (run > best) {
      best = run;
      arg = j;
    }
  }
  if (!(best > 0.0))
    throw Error(ErrorKind::NoTransition, "no transition between the shock states");
  if (arg + 1 >= u.size()) return sol.x.back() + 0.5 * sol.dx;
  // Sub-cell midline crossing between cells arg and arg + 1.
  const double a = u[arg] - mid, b = u[arg + 1] - mid;
  double x_cross = sol.x[arg];
  if (a != b) x_cross += sol.dx * std::clamp(a / (a - b), 0.0, 1.0);

  // Refine by a local mass balance over a window around the crossing: the interface position
  // that makes a two-state step carry the same mass as the data.
  const std::size_t w = 8;
  const std::size_t lo = arg >= w ? arg - w : 0;
  const std::size_t hi = std::min(arg + 1 + w, u.size() - 1);
  const double ul = u[lo], ur = u[hi];
  if (std::abs(ul - ur) < 0.25 * std::abs(shock.u_minus - shock.u_plus)) return x_cross;
  const double xa = sol.x[lo] + 0.5 * sol.dx;  // right edge of cell lo
  double excess = 0.0;
  for (std::size_t j = lo + 1; j < hi; ++j) excess += (u[j] - ur) * sol.dx;
  const double x_mass = xa + excess / (ul - ur);
  if (std::abs(x_mass - x_cross) > (w + 1) * sol.dx) return x_cross;
  return x_mass;
}

ShockTrajectory track_shock(const GridSolution& sol, const ShockData& shock) {
  ShockTrajectory traj;
  traj.times = sol.times;
  traj.positions.reserve(sol.states.size());
  for (const auto& u : sol.states) traj.positions.push_back(locate_shock(sol, u, shock));
  return traj;
}

FluxPrimitive::FluxPrimitive(const FluxModel& flux, const PeriodicSignal& ub, double u_bar_plus,
                             std::size_t samples)
    : period_(ub.period()) {
  std::vector<double> fs(samples);
  for (std::size_t j = 0; j < samples; ++j)
    fs[j] = flux(ub(period_ * double(j) / double(samples)));
  const auto c = real_fourier(fs);
  mean_excess_ = c[0].real() - flux(u_bar_plus);
  double scale = 0.0;
  for (double v : fs) scale = std::max(scale, std::abs(v));
  for (std::size_t k = 1; k + 1 < c.size(); ++k)
    if (std::abs(c[k]) > 1e-15 * std::max(scale, 1.0)) modes_.emplace_back(int(k), c[k]);
}

double FluxPrimitive::operator()(double t) const {
  const double w = 2.0 * std::numbers::pi / period_;
  double v = mean_excess_ * t;
  for (const auto& [k, ck] : modes_) {
    const cplx iwk(0.0, w * k);
    v += 2.0 * (ck * (std::polar(1.0, w * k * t) - 1.0) / iwk).real();
  }
  return v;
}

double predicted_final_shift(const FluxModel& flux, const Profile& u0, const PeriodicSignal& ub,
                             const ShockData& shock, double x_left) {
  const std::size_t n = static_cast<std::size_t>(std::max(2000.0, -x_left * 4000.0));
  const double mass = simpson([&](double y) { return u0(y) - shock.u_minus; }, x_left, 0.0, n);
  const double tb = divide_time(flux, ub);
  const FluxPrimitive prim(flux, ub, shock.u_plus);
  const double cumulative = std::max(0.0, prim(tb));
  return (-mass + cumulative) / shock.jump();
}

ShiftDecay shift_decay(const FluxModel& flux, const Profile& u0, const PeriodicSignal& ub,
                       const ShockData& shock, const InviscidConfig& cfg, double x_inf,
                       double t_from, double t_to, double window) {
  if (!(t_from > 0.0) || !(t_to > t_from) || !(window > 0.0))
    throw Error(ErrorKind::InvalidArgument, "shift_decay: need 0 < t_from < t_to, window > 0");
  ShiftDecay out;
  for (int level = 0; level < 3; ++level) {
    InviscidConfig c = cfg;
    c.dx = cfg.dx / std::pow(2.0, level);
    const GridSolution sol = solve_inviscid(flux, u0, ub, c);
    const ShockTrajectory tr = track_shock(sol, shock);
    if (level == 0) out.times = tr.times;
    if (tr.times.size() != out.times.size())
      throw Error(ErrorKind::InvalidArgument, "shift_decay: snapshot times differ between grids");
    std::vector<double> d(tr.times.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (std::abs(tr.times[i] - out.times[i]) > 1e-9)
        throw Error(ErrorKind::InvalidArgument, "shift_decay: snapshot times differ between grids");
      d[i] = tr.positions[i] - shock.speed * tr.times[i] - x_inf;
    }
    out.dx.push_back(c.dx);
    out.raw.push_back(std::move(d));
  }

  double coarse = 0.0, fine = 0.0;
  for (std::size_t i = 0; i < out.times.size(); ++i) {
    if (out.times[i] < t_from || out.times[i] > t_to) continue;
    coarse += std::abs(out.raw[0][i] - out.raw[1][i]);
    fine += std::abs(out.raw[1][i] - out.raw[2][i]);
  }
  if (!(fine < coarse)) {
    std::ostringstream msg;
    msg << "shift_decay: grid differences " << coarse << " -> " << fine << " do not shrink";
    throw Error(ErrorKind::NonMonotoneErrors, msg.str());
  }
  out.order = std::log2(coarse / fine);
  const double r = 1.0 / (std::pow(2.0, out.order) - 1.0);
  out.extrapolated.resize(out.times.size());
  for (std::size_t i = 0; i < out.times.size(); ++i)
    out.extrapolated[i] = out.raw[2][i] - r * (out.raw[1][i] - out.raw[2][i]);

  for (double w0 = t_from; w0 + window <= t_to + 1e-9; w0 += window) {
    double m = 0.0;
    for (std::size_t i = 0; i < out.times.size(); ++i)
      if (out.times[i] >= w0 && out.times[i] < w0 + window)
        m = std::max(m, std::abs(out.extrapolated[i]));
    out.window_times.push_back(w0 + 0.5 * window);
    out.envelope.push_back(m);
  }
  out.fit = fit_loglog(out.window_times, out.envelope);
  return out;
}

StructureReport verify_structure(const GridSolution& sol, const ShockTrajectory& traj,
                                 const ShockData& shock, const InviscidWaveField& wave,
                                 double t_from, double t_to, double margin,
                                 std::size_t probe_cells) {
  StructureReport rep;
  for (std::size_t s = 0; s < sol.times.size(); ++s) {
    const double t = sol.times[s];
    if (t < t_from || t > t_to) continue;
    const auto& u = sol.states[s];
    const double xs = traj.positions[s];
    std::vector<std::size_t> left, right;
    for (std::size_t j = 0; j < u.size(); ++j) {
      if (sol.x[j] < xs - margin) left.push_back(j);
      else if (sol.x[j] > xs + margin) right.push_back(j);
    }
    double lgap = 0.0;
    for (std::size_t j : left) lgap = std::max(lgap, std::abs(u[j] - shock.u_minus));
    double rgap = 0.0, rmean = 0.0;
    std::size_t count = 0;
    const std::size_t stride = std::max<std::size_t>(1, right.size() / probe_cells);
    for (std::size_t i = 0; i < right.size(); i += stride) {
      const std::size_t j = right[i];
      const double d = std::abs(u[j] - wave(sol.x[j], t));
      rgap = std::max(rgap, d);
      rmean += d;
      ++count;
    }
    rep.times.push_back(t);
    rep.left_gap.push_back(lgap);
    rep.right_gap.push_back(rgap);
    rep.right_gap_mean.push_back(count ? rmean / double(count) : 0.0);
  }
  auto try_fit = [&](const std::vector<double>& y, double& slope, bool& ok) {
    std::vector<double> tt, yy;
    for (std::size_t i = 0; i < y.size(); ++i)
      if (rep.times[i] > 0 && y[i] > 1e-14) {
        tt.push_back(rep.times[i]);
        yy.push_back(y[i]);
      }
    if (tt.size() >= 5) {
      slope = fit_loglog(tt, yy).slope;
      ok = true;
    }
  };
  try_fit(rep.left_gap, rep.left_decay_exponent, rep.left_fit_valid);
  try_fit(rep.right_gap, rep.right_decay_exponent, rep.right_fit_valid);
  return rep;
}

namespace {

double sample_state(const GridSolution& sol, const std::vector<double>& u, double x) {
  return interp_uniform(u, sol.x.front(), sol.dx, x);
}

}  // namespace

CurveSet coincidence_time(const FluxModel& flux, const GridSolution& sol, const Profile& u0,
                          const PeriodicSignal& ub, const ShockData& shock) {
  CurveSet cs;
  // x0: largest minimiser of int_0^x (u0 - u_minus) over x <= 0.
  {
    double run = 0.0, best = 0.0;
    cs.x0 = 0.0;
    for (std::size_t j = sol.cells(); j-- > 0;) {
      run -= (u0(sol.x[j]) - shock.u_minus) * sol.dx;
      if (run < best - 1e-12) {
        best = run;
        cs.x0 = sol.x[j] - 0.5 * sol.dx;
      }
    }
  }
  cs.t_b = divide_time(flux, ub);
  const double slope1 = flux.d1(shock.u_minus), slope2 = flux.d1(shock.u_plus);

  const double ul0 = u0(-0.5 * sol.dx), ur0 = ub(0.0);
  double x1 = 0.0, x2 = 0.0;
  double v1 = 0.0, v2 = 0.0;
  if (ul0 > ur0) {
    v1 = v2 = averaged_speed(flux, ul0, ur0);
  } else {
    v1 = flux.d1(ul0);
    v2 = flux.d1(ur0);
  }
  const double probe = 1.5 * sol.dx;
  auto local_speed = [&](const std::vector<double>& u, double x) {
    const double xr = std::min(x + probe, sol.x.back());
    const double xl = std::max(x - probe, sol.x.front());
    return averaged_speed(flux, sample_state(sol, u, xl), sample_state(sol, u, xr));
  };

  double last_bad = -1.0;
  for (std::size_t s = 0; s < sol.times.size(); ++s) {
    const double t = sol.times[s];
    if (s > 0) {
      const double dt = t - sol.times[s - 1];
      const auto& prev = sol.states[s - 1];
      const auto& cur = sol.states[s];
      // Heun step through the stored snapshots.
      const double a1 = s == 1 ? v1 : local_speed(prev, x1);
      const double a2 = s == 1 ? v2 : local_speed(prev, x2);
      const double p1 = std::min(x1 + dt * a1, 0.0), p2 = std::min(x2 + dt * a2, 0.0);
      x1 = std::min(x1 + 0.5 * dt * (a1 + local_speed(cur, p1)), 0.0);
      x2 = std::min(x2 + 0.5 * dt * (a2 + local_speed(cur, p2)), 0.0);
      if (x1 > x2) x1 = x2 = 0.5 * (x1 + x2);
    }
    const double g1 = cs.x0 + slope1 * t;
    const double g2 = t > cs.t_b ? slope2 * (t - cs.t_b) : 0.0;
    const double s1 = std::min(x1, g1), s2 = std::max(x2, g2);
    cs.times.push_back(t);
    cs.x1.push_back(x1);
    cs.x2.push_back(x2);
    cs.gamma1.push_back(g1);
    cs.gamma2.push_back(g2);
    cs.x1_star.push_back(s1);
    cs.x2_star.push_back(s2);
    if (s2 - s1 >= 2.0 * sol.dx) last_bad = t;
  }
  if (cs.x2_star.back() - cs.x1_star.back() >= 2.0 * sol.dx)
    throw Error(ErrorKind::NotCoincided, "X1* and X2* never coincide within the run");
  cs.coincidence_time = 0.0;
  if (last_bad >= 0.0) {
    const auto it = std::upper_bound(cs.times.begin(), cs.times.end(), last_bad);
    cs.coincidence_time = it == cs.times.end() ? cs.times.back() : *it;
  }
  return cs;
}

}  // namespace tpshock
