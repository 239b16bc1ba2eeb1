#include "tpshock/ibvp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tpshock/error.hpp"
#include "tpshock/numerics.hpp"

namespace tpshock {

namespace {

double van_leer(double a, double b) { return a * b > 0.0 ? 2.0 * a * b / (a + b) : 0.0; }

double trapezoid_nodes(const std::vector<double>& x, const std::vector<double>& y,
                       std::size_t from = 0) {
  double s = 0.0;
  for (std::size_t j = from + 1; j < x.size(); ++j) s += 0.5 * (x[j] - x[j - 1]) * (y[j] + y[j - 1]);
  return s;
}

double sup_difference(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) worst = std::max(worst, std::abs(a[j] - b[j]));
  return worst;
}

}  // namespace

ViscousStepper::ViscousStepper(const FluxModel& flux, const Profile& u0, const PeriodicSignal& ub,
                               const ViscousConfig& cfg)
    : flux_(flux), ub_(ub), cfg_(cfg) {
  if (!(cfg.dx > 0.0) || !(cfg.x_left < 0.0) || !(cfg.t_end >= 0.0) || !(cfg.snapshot_dt > 0.0) ||
      !(cfg.cfl > 0.0))
    throw Error(ErrorKind::InvalidArgument, "viscous grid needs dx > 0, x_left < 0, snapshot_dt > 0");
  if (cfg.required_x_left && cfg.x_left > *cfg.required_x_left) {
    std::ostringstream os;
    os << "x_left = " << cfg.x_left << " lies right of the required " << *cfg.required_x_left;
    throw Error(ErrorKind::DomainTooShort, os.str());
  }
  if (cfg.check_incoming) check_incoming(flux, ub, cfg.delta_b);

  const auto cells = std::size_t(std::llround(-cfg.x_left / cfg.dx));
  if (cells < 4) throw Error(ErrorKind::InvalidArgument, "viscous grid needs at least 4 cells");
  rec_.x_left = cfg.x_left;
  rec_.dx = -cfg.x_left / double(cells);
  rec_.x.resize(cells + 1);
  u_.resize(cells + 1);
  for (std::size_t j = 0; j <= cells; ++j) {
    rec_.x[j] = cfg.x_left + double(j) * rec_.dx;
    u_[j] = u0(rec_.x[j]);
  }
  rec_.x.back() = 0.0;
  if (cfg.left == LeftBoundary::Pinned) u_.front() = cfg.u_left;
  u_.back() = ub(0.0);

  double speed = 0.0;
  for (double v : u_) speed = std::max(speed, std::abs(flux.d1(v)));
  for (double v : ub.samples()) speed = std::max(speed, std::abs(flux.d1(v)));
  const double dx = rec_.dx;
  if (cfg.dt > 0.0) {
    if (speed * cfg.dt / dx > kMaxViscousCfl) {
      std::ostringstream os;
      os << "advective CFL " << speed * cfg.dt / dx << " > " << kMaxViscousCfl;
      throw Error(ErrorKind::CflViolation, os.str());
    }
    steps_per_snapshot_ = std::max<std::size_t>(1, std::size_t(std::llround(cfg.snapshot_dt / cfg.dt)));
  } else {
    const double cfl = std::min(cfg.cfl, kMaxViscousCfl);
    const double dt_max = speed > 0.0 ? cfl * dx / speed : cfl * dx;
    steps_per_snapshot_ = std::size_t(std::ceil(cfg.snapshot_dt / dt_max - 1e-9));
  }
  dt_ = cfg.snapshot_dt / double(steps_per_snapshot_);
  steps_total_ = std::size_t(std::llround(cfg.t_end / dt_));

  stage_.resize(u_.size());
  work_.resize(u_.size());
  slope_.assign(u_.size(), 0.0);
  rec_.mass.push_back(mass());
  snapshot();
}

double ViscousStepper::numerical_flux(double a, double b) const {
  if (const auto sonic = flux_.sonic_point(); flux_.convex() && sonic) {
    const double w = *sonic;
    return flux_(std::max(a, w)) + flux_(std::min(b, w)) - flux_(w);
  }
  if (a == b) return flux_(a);
  const double spread =
      gauss_legendre_16([&](double v) { return std::abs(flux_.d1(v)); }, std::min(a, b), std::max(a, b));
  return 0.5 * (flux_(a) + flux_(b)) - 0.5 * (b > a ? spread : -spread);
}

void ViscousStepper::rhs(const std::vector<double>& u, std::vector<double>& out, double& fl,
                         double& fr) {
  const std::size_t m = u.size() - 1;
  const double dx = rec_.dx;
  auto& s = slope_;
  s[0] = s[m] = 0.0;
  for (std::size_t j = 1; j < m; ++j) s[j] = van_leer(u[j] - u[j - 1], u[j + 1] - u[j]);
  double left_face = numerical_flux(u[0] + 0.5 * s[0], u[1] - 0.5 * s[1]);
  if (cfg_.left == LeftBoundary::Pinned) {
    out[0] = 0.0;
    fl = left_face;
  } else {
    fl = flux_(u[0]);
    out[0] = -(left_face - fl) / (0.5 * dx);
  }
  for (std::size_t j = 1; j < m; ++j) {
    const double right_face = numerical_flux(u[j] + 0.5 * s[j], u[j + 1] - 0.5 * s[j + 1]);
    out[j] = -(right_face - left_face) / dx;
    left_face = right_face;
  }
  out[m] = 0.0;
  fr = left_face;
}

void ViscousStepper::advect(double t0, double tau, double& left_flux, double& right_flux) {
  const std::size_t m = u_.size() - 1;
  double al = 0.0, ar = 0.0, bl = 0.0, br = 0.0;
  u_[m] = ub_(t0);
  rhs(u_, work_, al, ar);
  for (std::size_t j = 0; j <= m; ++j) stage_[j] = u_[j] + tau * work_[j];
  stage_[m] = ub_(t0 + tau);
  rhs(stage_, work_, bl, br);
  for (std::size_t j = 0; j < m; ++j) u_[j] = 0.5 * u_[j] + 0.5 * (stage_[j] + tau * work_[j]);
  u_[m] = ub_(t0 + tau);
  left_flux += 0.5 * tau * (al + bl);
  right_flux += 0.5 * tau * (ar + br);
}

void ViscousStepper::diffuse(double t0, double dt, double& left_flux, double& right_flux) {
  const std::size_t m = u_.size() - 1;
  const double dx = rec_.dx;
  const double lam = dt / (2.0 * dx * dx);
  const double b_old = ub_(t0), b_new = ub_(t0 + dt);
  const bool pinned = cfg_.left == LeftBoundary::Pinned;
  const std::size_t first = pinned ? 1 : 0;
  const std::size_t n = m - first;
  lo_.assign(n, -lam);
  di_.assign(n, 1.0 + 2.0 * lam);
  up_.assign(n, -lam);
  rhs_.resize(n);
  std::vector<double> old = u_;
  old[m] = b_old;
  for (std::size_t j = first; j < m; ++j)
    rhs_[j - first] = j == 0 ? old[0] + 2.0 * lam * (old[1] - old[0])
                             : old[j] + lam * (old[j - 1] - 2.0 * old[j] + old[j + 1]);
  if (pinned)
    rhs_[0] += lam * cfg_.u_left;
  else
    up_[0] = -2.0 * lam;
  rhs_[n - 1] += lam * b_new;
  solve_tridiagonal(lo_, di_, up_, rhs_);
  for (std::size_t j = first; j < m; ++j) u_[j] = rhs_[j - first];
  u_[m] = b_new;
  if (pinned) {
    u_[0] = cfg_.u_left;
    left_flux -= 0.5 * dt * ((old[1] - old[0]) + (u_[1] - u_[0])) / dx;
  }
  right_flux -= 0.5 * dt * ((b_old - old[m - 1]) + (b_new - u_[m - 1])) / dx;
}

void ViscousStepper::step() {
  if (done()) return;
  const std::size_t m = u_.size() - 1;
  double speed = 0.0;
  for (double v : u_) speed = std::max(speed, std::abs(flux_.d1(v)));
  if (speed * dt_ / rec_.dx > kMaxViscousCfl) {
    std::ostringstream os;
    os << "advective CFL " << speed * dt_ / rec_.dx << " > " << kMaxViscousCfl << " at t = " << t_;
    throw Error(ErrorKind::CflViolation, os.str());
  }
  double fl = 0.0, fr = 0.0;
  advect(t_, 0.5 * dt_, fl, fr);
  diffuse(t_, dt_, fl, fr);
  advect(t_ + 0.5 * dt_, 0.5 * dt_, fl, fr);
  ++step_;
  t_ = double(step_) * dt_;
  rec_.step_times.push_back(t_);
  rec_.step_dt.push_back(dt_);
  rec_.boundary_trace.push_back(u_[m - 1]);
  rec_.flux_trace.push_back(fr / dt_);
  rec_.left_flux_trace.push_back(fl / dt_);
  rec_.mass.push_back(mass());
  if (step_ % steps_per_snapshot_ == 0) snapshot();
}

double ViscousStepper::boundary_slope() const {
  const std::size_t m = u_.size() - 1;
  return (11.0 * u_[m] - 18.0 * u_[m - 1] + 9.0 * u_[m - 2] - 2.0 * u_[m - 3]) / (6.0 * rec_.dx);
}

double ViscousStepper::mass() const {
  double s = 0.0;
  for (std::size_t j = 1; j + 1 < u_.size(); ++j) s += u_[j];
  s *= rec_.dx;
  if (cfg_.left == LeftBoundary::Neumann) s += 0.5 * rec_.dx * u_[0];
  return s;
}

void ViscousStepper::snapshot() {
  if (!rec_.times.empty() && rec_.times.back() == t_) return;
  rec_.times.push_back(t_);
  rec_.states.push_back(u_);
}

GridSolution solve_viscous(const FluxModel& flux, const Profile& u0, const PeriodicSignal& ub,
                           const ViscousConfig& cfg) {
  ViscousStepper stepper(flux, u0, ub, cfg);
  while (!stepper.done()) stepper.step();
  return stepper.take_record();
}

Ansatz::Ansatz(const ShockProfile& profile, const SpectralWave& wave, std::vector<double> nodes)
    : profile_(profile),
      wave_(wave),
      nodes_(std::move(nodes)),
      first_(std::size_t(std::lower_bound(nodes_.begin(), nodes_.end(), wave.x().front()) -
                         nodes_.begin())),
      sampler_(wave, std::vector<double>(nodes_.begin() + std::ptrdiff_t(first_), nodes_.end())) {}

void Ansatz::wave(double t, std::vector<double>& u, std::vector<double>& ux) const {
  std::vector<double> a, b;
  sampler_.evaluate(t, a, b);
  u.assign(nodes_.size(), wave_.u_bar_plus());
  ux.assign(nodes_.size(), 0.0);
  std::copy(a.begin(), a.end(), u.begin() + std::ptrdiff_t(first_));
  std::copy(b.begin(), b.end(), ux.begin() + std::ptrdiff_t(first_));
}

void Ansatz::evaluate(double t, double shift, std::vector<double>& out) const {
  std::vector<double> w, wx;
  wave(t, w, wx);
  out.resize(nodes_.size());
  const double um = u_minus(), offset = speed() * t + shift;
  for (std::size_t j = 0; j < nodes_.size(); ++j) {
    const double sigma = profile_.sigma_at(nodes_[j] - offset);
    out[j] = um * (1.0 - sigma) + w[j] * sigma;
  }
}

void Ansatz::superposition(double t, double shift, std::vector<double>& out) const {
  std::vector<double> w, wx;
  wave(t, w, wx);
  out.resize(nodes_.size());
  const double offset = speed() * t + shift;
  for (std::size_t j = 0; j < nodes_.size(); ++j)
    out[j] = profile_(nodes_[j] - offset) + w[j] - u_plus();
}

double initial_shift(const Profile& u0, const Ansatz& ansatz, double tol) {
  std::vector<double> data(ansatz.nodes().size());
  for (std::size_t j = 0; j < data.size(); ++j) data[j] = u0(ansatz.nodes()[j]);
  return initial_shift(data, ansatz, tol);
}

double initial_shift(const std::vector<double>& data, const Ansatz& ansatz, double tol) {
  const auto& x = ansatz.nodes();
  if (data.size() != x.size()) throw Error(ErrorKind::InvalidArgument, "data and nodes differ in size");
  std::vector<double> usharp;
  auto defect = [&](double shift) {
    ansatz.evaluate(0.0, shift, usharp);
    for (std::size_t j = 0; j < x.size(); ++j) usharp[j] = data[j] - usharp[j];
    return trapezoid_nodes(x, usharp);
  };
  const double margin = 10.0 / ansatz.profile().theta();
  double lo = x.front() + margin, hi = -margin;
  if (!(lo < hi)) throw Error(ErrorKind::NoRoot, "domain too short for the shift bracket");
  double flo = defect(lo), fhi = defect(hi);
  if (std::abs(flo) < tol) return lo;
  if (std::abs(fhi) < tol) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) {
    std::ostringstream os;
    os << "mass defect has one sign on [" << lo << ", " << hi << "]: " << flo << ", " << fhi;
    throw Error(ErrorKind::NoRoot, os.str());
  }
  double mid = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    mid = 0.5 * (lo + hi);
    const double fm = defect(mid);
    if (std::abs(fm) < tol || hi - lo < 1e-15 * (1.0 + std::abs(mid))) break;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return mid;
}

ShiftRhs shift_rhs(const FluxModel& flux, const Ansatz& ansatz, double t, double shift,
                   double boundary_slope) {
  const auto& x = ansatz.nodes();
  const auto& prof = ansatz.profile();
  const std::size_t m = x.size() - 1;
  const double um = ansatz.u_minus(), up = ansatz.u_plus(), s = ansatz.speed();
  const double offset = s * t + shift;
  std::vector<double> w, wx;
  ansatz.wave(t, w, wx);

  const double xi0 = x[m] - offset;
  const double sig0 = prof.sigma_at(xi0), dsig0 = prof.dsigma_at(xi0);
  const double ub = w[m];

  ShiftRhs r;
  r.group_i = flux(up) - flux(prof(xi0)) - boundary_slope + (ub - um) * dsig0 + wx[m] * sig0;
  r.group_iii = (flux(ub) - flux(up)) * (1.0 - sig0) - (ub - up) * dsig0;

  const std::size_t from = ansatz.wave_begin() > 0 ? ansatz.wave_begin() - 1 : 0;
  std::vector<double> g(x.size(), 0.0), h(x.size(), 0.0);
  for (std::size_t j = from; j <= m; ++j) {
    const double ds = prof.dsigma_at(x[j] - offset);
    g[j] = (-(w[j] - up) * s + flux(w[j]) - flux(up) - wx[j]) * ds;
    h[j] = (w[j] - up) * ds;
  }
  r.group_ii = trapezoid_nodes(x, g, from);
  r.unperturbed = (up - um) * (sig0 - prof.sigma_at(x.front() - offset));
  r.denominator = r.unperturbed + trapezoid_nodes(x, h, from);
  if (std::abs(r.denominator) < 0.5 * std::abs(r.unperturbed)) {
    std::ostringstream os;
    os << "shift denominator " << r.denominator << " below half of " << r.unperturbed;
    throw Error(ErrorKind::DenominatorNearZero, os.str());
  }
  r.rate = (r.group_i + r.group_ii + r.group_iii) / r.denominator;
  return r;
}

std::vector<double> anti_derivative(const std::vector<double>& x, const std::vector<double>& u,
                                    const std::vector<double>& u_sharp) {
  std::vector<double> out(x.size(), 0.0);
  for (std::size_t j = 1; j < x.size(); ++j)
    out[j] = out[j - 1] + 0.5 * (x[j] - x[j - 1]) * ((u[j] - u_sharp[j]) + (u[j - 1] - u_sharp[j - 1]));
  return out;
}

CoupledResult run_coupled(const FluxModel& flux, const Profile& u0, const PeriodicSignal& ub,
                          const ShockProfile& profile, const SpectralWave& wave,
                          const CoupledConfig& cfg) {
  const ShockData& shock = profile.shock();
  if (std::abs(shock.u_plus - wave.u_bar_plus()) > 1e-10 * std::max(1.0, std::abs(shock.u_plus)))
    throw Error(ErrorKind::InvalidArgument, "profile end state differs from the wave far field");
  CoupledResult res;
  res.theta_s = profile.theta();
  if (std::round(1.0 / (res.theta_s * cfg.grid.dx)) < cfg.resolution) {
    std::ostringstream os;
    os << "dx = " << cfg.grid.dx << " gives fewer than " << cfg.resolution
       << " cells across the profile width " << 1.0 / res.theta_s;
    throw Error(ErrorKind::InvalidArgument, os.str());
  }

  ViscousConfig grid = cfg.grid;
  grid.left = LeftBoundary::Pinned;
  grid.u_left = shock.u_minus;
  grid.required_x_left.reset();
  ViscousStepper stepper(flux, u0, ub, grid);
  const auto& x = stepper.x();
  Ansatz ansatz(profile, wave, x);

  const double x0 = initial_shift(stepper.u(), ansatz);
  const double final_position = shock.speed * grid.t_end + x0;
  const double needed = final_position - cfg.domain_margin / res.theta_s;
  if (grid.x_left > needed) {
    std::ostringstream os;
    os << "x_left = " << grid.x_left << " but the shock reaches " << final_position
       << "; need x_left <= " << needed;
    throw Error(ErrorKind::DomainTooShort, os.str());
  }

  const double jump = std::abs(shock.jump());
  std::vector<double> usharp, sup;
  auto defect_at = [&](double t, double shift) {
    ansatz.evaluate(t, shift, usharp);
    double s = 0.0;
    const auto& u = stepper.u();
    for (std::size_t j = 1; j < x.size(); ++j)
      s += 0.5 * (x[j] - x[j - 1]) * ((u[j] - usharp[j]) + (u[j - 1] - usharp[j - 1]));
    return s;
  };
  auto record_snapshot = [&](double t, double shift) {
    const auto& u = stepper.u();
    ansatz.superposition(t, shift, sup);
    auto U = anti_derivative(x, u, usharp);
    std::vector<double> weighted(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) weighted[j] = (1.0 + std::abs(x[j])) * U[j] * U[j];
    res.anti.times.push_back(t);
    res.anti.left.push_back(U.front());
    res.anti.right.push_back(U.back());
    res.anti.weighted_norm.push_back(std::sqrt(trapezoid_nodes(x, weighted)));
    res.anti.values.push_back(std::move(U));
    res.superposition_gap.push_back(sup_difference(u, sup));
    res.ansatz_gap.push_back(sup_difference(usharp, sup));
    res.u_sharp.push_back(usharp);
  };
  auto check_position = [&](double t, double shift) {
    const double p = shock.speed * t + shift;
    if (!(p > grid.x_left + 5.0 / res.theta_s && p < 0.0)) {
      std::ostringstream os;
      os << "shock position " << p << " left the domain at t = " << t;
      throw Error(ErrorKind::ShiftDiverged, os.str());
    }
  };

  const std::size_t m = x.size() - 1;
  const double half_cell = 0.5 * (x[m] - x[m - 1]);
  std::vector<double> w, wx;
  auto mismatch = [&](double t, double shift) {
    ansatz.wave(t, w, wx);
    const double xi0 = x[m] - shock.speed * t - shift;
    const double sharp_slope =
        (w[m] - shock.u_minus) * profile.dsigma_at(xi0) + wx[m] * profile.sigma_at(xi0);
    return stepper.boundary_slope() - sharp_slope;
  };

  double shift = x0;
  res.shift.x0 = x0;
  res.shift.times.push_back(0.0);
  res.shift.shift.push_back(shift);
  res.shift.rate.push_back(shift_rhs(flux, ansatz, 0.0, shift, stepper.boundary_slope()).rate);
  res.shift.mass_defect.push_back(defect_at(0.0, shift));
  res.shift.slope_mismatch.push_back(mismatch(0.0, shift));
  record_snapshot(0.0, shift);

  std::size_t snapshots = stepper.record().times.size();
  while (!stepper.done()) {
    const double t0 = stepper.time();
    const double slope0 = stepper.boundary_slope();
    stepper.step();
    const double t1 = stepper.time(), dt = t1 - t0;
    const auto& rec = stepper.record();
    // Outflow through x = 0 seen by the trapezoid mass, which also holds half a cell of u_b.
    const double outflow = rec.flux_trace.back() - half_cell * (ub(t1) - ub(t0)) / dt;
    const double inflow = rec.left_flux_trace.back();
    auto slope_at = [&](double t, double stencil) {
      if (!cfg.scheme_boundary_flux) return stencil;
      return flux(wave.value(wave.x().size() - 1, t)) - outflow + inflow - flux(shock.u_minus);
    };
    const double g0 = shift_rhs(flux, ansatz, t0, shift, slope_at(t0, slope0)).rate;
    const double predictor = shift + dt * g0;
    check_position(t1, predictor);
    const double g1 =
        shift_rhs(flux, ansatz, t1, predictor, slope_at(t1, stepper.boundary_slope())).rate;
    shift += 0.5 * dt * (g0 + g1);
    check_position(t1, shift);
    res.shift.times.push_back(t1);
    res.shift.shift.push_back(shift);
    res.shift.rate.push_back(0.5 * (g0 + g1));
    res.shift.mass_defect.push_back(defect_at(t1, shift));
    res.shift.slope_mismatch.push_back(mismatch(t1, shift));
    if (rec.times.size() > snapshots) {
      snapshots = rec.times.size();
      record_snapshot(t1, shift);
    }
  }
  res.solution = stepper.take_record();

  auto& v = res.verdict;
  const auto& ts = res.shift.times;
  const double t_half = 0.5 * ts.back();
  const auto half = std::size_t(
      std::lower_bound(ts.begin(), ts.end(), t_half - 1e-12) - ts.begin());
  v.shift_change = std::abs(res.shift.shift.back() - res.shift.shift[std::min(half, ts.size() - 1)]);
  v.shift_converged = v.shift_change < cfg.tol_shift;
  v.gap_initial = res.superposition_gap.front();
  v.gap_final = res.superposition_gap.back();
  v.gap_decayed = v.gap_final < cfg.gap_fraction * v.gap_initial;
  for (double d : res.shift.mass_defect) v.max_defect = std::max(v.max_defect, std::abs(d));
  v.drift_bound = cfg.drift_factor * jump;
  v.defect_bounded = v.max_defect <= v.drift_bound;

  std::vector<double> ft, fg;
  for (std::size_t i = 0; i < res.ansatz_gap.size(); ++i)
    if (res.anti.times[i] > 0.0 && res.ansatz_gap[i] > cfg.gap_floor) {
      ft.push_back(res.anti.times[i]);
      fg.push_back(res.ansatz_gap[i]);
    }
  if (ft.size() >= 5) {
    const auto fit = fit_semilog(ft, fg);
    v.ansatz_gap_slope = fit.slope;
    v.ansatz_gap_r2 = fit.r_squared;
    v.ansatz_gap_linear = fit.slope < 0.0 && fit.r_squared >= 0.9;
  }
  return res;
}

WaveMarchReport compare_wave_march(const FluxModel& flux, const SpectralWave& wave,
                                   const PeriodicSignal& ub, double dx, int periods,
                                   int samples_per_period) {
  if (periods < 2 || samples_per_period < 2)
    throw Error(ErrorKind::InvalidArgument, "wave march needs >= 2 periods and samples");
  const double period = wave.period();
  ViscousConfig cfg;
  cfg.x_left = wave.x().front();
  cfg.dx = dx;
  cfg.left = LeftBoundary::Neumann;
  cfg.snapshot_dt = period / samples_per_period;
  cfg.t_end = periods * period;
  const double mean = ub.mean();
  const auto sol = solve_viscous(flux, [mean](double) { return mean; }, ub, cfg);

  WaveSampler sampler(wave, sol.x);
  WaveMarchReport rep;
  const std::size_t last = sol.times.size() - 1;
  const auto n = std::size_t(samples_per_period);
  std::vector<double> w, wx, sq(sol.x.size());
  double acc = 0.0;
  for (std::size_t i = last + 1 - n; i <= last; ++i) {
    sampler.evaluate(sol.times[i], w, wx);
    const auto& u = sol.states[i];
    for (std::size_t j = 0; j < u.size(); ++j) sq[j] = (u[j] - w[j]) * (u[j] - w[j]);
    acc += trapezoid_nodes(sol.x, sq);
    rep.sup_difference = std::max(rep.sup_difference, sup_difference(u, w));
    rep.period_drift = std::max(rep.period_drift, sup_difference(u, sol.states[i - n]));
  }
  rep.l2_difference = std::sqrt(acc / double(n));
  rep.samples = n;
  return rep;
}

}  // namespace tpshock
