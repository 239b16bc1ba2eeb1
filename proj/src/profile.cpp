#include "tpshock/profile.hpp"

#include <algorithm>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <sstream>

#include "tpshock/error.hpp"
#include "tpshock/numerics.hpp"

namespace tpshock {

namespace {

namespace ode = boost::numeric::odeint;
using Stepper = ode::runge_kutta_dopri5<double, double, double, double, ode::vector_space_algebra>;

// Integrates w' = rhs(w) through the increasing abscissae `eta`, with w(0) = w0. Stops integrating
// once |w| < handoff and continues with w * exp(-rate * (eta - eta_h)). Returns the handoff index.
template <class Rhs>
std::size_t integrate_side(Rhs rhs, double w0, const std::vector<double>& eta, double rate,
                           double tol, double handoff, std::vector<double>& w) {
  w.assign(eta.size(), 0.0);
  w[0] = w0;
  // Local tolerances sit below tol so the accumulated global error stays under it.
  auto stepper = ode::make_dense_output(tol * 1e-4, 0.05 * tol, Stepper());
  auto sys = [&](const double& x, double& dxdt, double) { dxdt = rhs(x); };
  stepper.initialize(w0, 0.0, 1e-3);
  std::size_t i = 1;
  for (; i < eta.size(); ++i) {
    while (stepper.current_time() < eta[i]) stepper.do_step(sys);
    double x = 0.0;
    stepper.calc_state(eta[i], x);
    w[i] = x;
    if (std::abs(x) < handoff) break;
  }
  if (i >= eta.size()) return eta.size() - 1;
  for (std::size_t k = i + 1; k < eta.size(); ++k) w[k] = w[i] * std::exp(-rate * (eta[k] - eta[i]));
  return i;
}

}  // namespace

ShockProfile solve_profile(const FluxModel& flux, const ShockData& shock,
                           const ProfileOptions& opt) {
  const double um = shock.u_minus, up = shock.u_plus, s = shock.speed;
  ShockProfile p(flux, shock);
  // Decay rates of phi - u_minus as xi -> -inf and phi - u_plus as xi -> +inf.
  const double dir = um > up ? 1.0 : -1.0;
  p.rate_left_ = dir * (flux.d1(um) - s);
  p.rate_right_ = dir * (s - flux.d1(up));
  if (!(p.rate_left_ > 1e-10) || !(p.rate_right_ > 1e-10))
    throw Error(ErrorKind::DegenerateShock, "f'(u) equals the shock speed at an end state");

  // Oleinik: f0 has the sign of (u_plus - u_minus) strictly inside the interval.
  const int samples = 512;
  for (int j = 0; j < samples; ++j) {
    const double phi = um + (up - um) * (j + 0.5) / samples;
    const double v = oleinik_f0(flux, shock, phi);
    if (!(v * (up - um) > 0.0)) {
      std::ostringstream os;
      os << "f0(" << phi << ") = " << v << " violates the entropy sign";
      throw Error(ErrorKind::OleinikViolated, os.str());
    }
  }

  const double theta = p.theta();
  const double L = opt.xi_range > 0.0 ? opt.xi_range : 60.0 / theta;
  const std::size_t N = std::max<std::size_t>(opt.nodes_per_side, 16);
  const double a = 1.0 / std::max(p.rate_left_, p.rate_right_);
  const double deta = std::asinh(L / a) / double(N);
  std::vector<double> eta(N + 1);
  for (std::size_t i = 0; i <= N; ++i) eta[i] = a * std::sinh(deta * double(i));

  const double phi0 = opt.anchor.value_or(0.5 * (um + up));
  if (!((phi0 - up) * (phi0 - um) < 0.0))
    throw Error(ErrorKind::InvalidArgument, "profile anchor must lie strictly between the states");

  std::vector<double> wr, wl;
  auto rhs_right = [&](double w) { return oleinik_f0(flux, shock, up + w, Anchor::Plus); };
  auto rhs_left = [&](double w) { return -oleinik_f0(flux, shock, um + w, Anchor::Minus); };
  const std::size_t hr =
      integrate_side(rhs_right, phi0 - up, eta, p.rate_right_, opt.tol, opt.handoff, wr);
  const std::size_t hl =
      integrate_side(rhs_left, phi0 - um, eta, p.rate_left_, opt.tol, opt.handoff, wl);

  const std::size_t total = 2 * N + 1;
  p.xi_.resize(total);
  p.phi_.resize(total);
  p.dphi_.resize(total);
  p.sigma_.resize(total);
  for (std::size_t i = 0; i <= N; ++i) {
    p.xi_[N - i] = -eta[i];
    p.phi_[N - i] = um + wl[i];
    p.xi_[N + i] = eta[i];
    p.phi_[N + i] = up + wr[i];
  }
  p.phi_[N] = phi0;
  for (std::size_t i = 0; i < total; ++i) {
    const double phi = p.phi_[i];
    const bool near_minus = i < N;
    p.dphi_[i] = oleinik_f0(flux, shock, phi, near_minus ? Anchor::Minus : Anchor::Plus);
    p.sigma_[i] = (phi - um) / (up - um);
  }
  p.handoff_left_ = N - hl;
  p.handoff_right_ = N + hr;
  return p;
}

std::size_t ShockProfile::locate(double xi) const {
  const auto it = std::upper_bound(xi_.begin(), xi_.end(), xi);
  std::size_t i = std::size_t(it - xi_.begin());
  return std::clamp<std::size_t>(i, 1, xi_.size() - 1) - 1;
}

double ShockProfile::value(double xi) const {
  if (xi <= xi_.front())
    return shock_.u_minus + (phi_.front() - shock_.u_minus) * std::exp(rate_left_ * (xi - xi_.front()));
  if (xi >= xi_.back())
    return shock_.u_plus + (phi_.back() - shock_.u_plus) * std::exp(-rate_right_ * (xi - xi_.back()));
  const std::size_t i = locate(xi);
  const double h = xi_[i + 1] - xi_[i];
  const double t = (xi - xi_[i]) / h, t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * phi_[i] + (t3 - 2 * t2 + t) * h * dphi_[i] +
         (-2 * t3 + 3 * t2) * phi_[i + 1] + (t3 - t2) * h * dphi_[i + 1];
}

double ShockProfile::derivative(double xi) const {
  if (xi <= xi_.front())
    return rate_left_ * (phi_.front() - shock_.u_minus) * std::exp(rate_left_ * (xi - xi_.front()));
  if (xi >= xi_.back())
    return -rate_right_ * (phi_.back() - shock_.u_plus) *
           std::exp(-rate_right_ * (xi - xi_.back()));
  const std::size_t i = locate(xi);
  const double h = xi_[i + 1] - xi_[i];
  const double t = (xi - xi_[i]) / h, t2 = t * t;
  return ((6 * t2 - 6 * t) * phi_[i] + (-6 * t2 + 6 * t) * phi_[i + 1]) / h +
         (3 * t2 - 4 * t + 1) * dphi_[i] + (3 * t2 - 2 * t) * dphi_[i + 1];
}

double ShockProfile::sigma_at(double xi) const {
  return (value(xi) - shock_.u_minus) / shock_.jump();
}

double ShockProfile::dsigma_at(double xi) const { return derivative(xi) / shock_.jump(); }

std::optional<double> ShockProfile::sigma_flux_form(std::size_t i) const {
  const double df = flux_(shock_.u_plus) - flux_(shock_.u_minus);
  if (std::abs(df) < 1e-12 * (1.0 + std::abs(flux_(shock_.u_minus)))) return std::nullopt;
  return (flux_(phi_[i]) - flux_(shock_.u_minus) - dphi_[i]) / df;
}

double ShockProfile::max_integral_residual() const {
  static constexpr double gx[5] = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                   0.5384693101056831, 0.9061798459386640};
  static constexpr double gw[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                   0.4786286704993665, 0.2369268850561891};
  double worst = 0.0;
  for (std::size_t i = 0; i + 1 < xi_.size(); ++i) {
    const double a = xi_[i], b = xi_[i + 1];
    const double c = 0.5 * (a + b), r = 0.5 * (b - a);
    double integral = 0.0;
    for (int q = 0; q < 5; ++q) {
      const double phi = value(c + r * gx[q]);
      const bool near_minus = std::abs(phi - shock_.u_minus) < std::abs(phi - shock_.u_plus);
      integral += gw[q] * r * oleinik_f0(flux_, shock_, phi, near_minus ? Anchor::Minus : Anchor::Plus);
    }
    worst = std::max(worst, std::abs(phi_[i + 1] - phi_[i] - integral));
  }
  return worst;
}

TailRates tail_rates(const ShockProfile& p) {
  TailRates r;
  r.predicted_left = p.rate_left();
  r.predicted_right = p.rate_right();
  const auto& xi = p.xi();
  const auto& phi = p.phi();
  const std::size_t mid = xi.size() / 2;
  auto fit_side = [&](std::size_t from, std::size_t to, double end) {
    // from, to: node range [from, to] measured along the side, both inclusive.
    std::vector<double> xs, ys;
    for (std::size_t i = from; i <= to; ++i) {
      const double d = std::abs(phi[i] - end);
      if (d <= 0.0) continue;
      xs.push_back(std::abs(xi[i]));
      ys.push_back(std::log(d));
    }
    return fit_line(xs, ys);
  };
  {
    const std::size_t hr = p.handoff_right();
    const double x_end = xi[hr];
    std::size_t from = mid;
    while (from < hr && xi[from] < 0.75 * x_end) ++from;
    from = std::min(from, hr - std::min<std::size_t>(hr - mid, 5));
    const auto fit = fit_side(from, hr, p.shock().u_plus);
    r.fitted_right = -fit.slope;
    r.constant_right = std::exp(fit.intercept);
  }
  {
    const std::size_t hl = p.handoff_left();
    const double x_end = -xi[hl];
    std::size_t to = mid;
    while (to > hl && -xi[to] < 0.75 * x_end) --to;
    to = std::max(to, hl + std::min<std::size_t>(mid - hl, 5));
    const auto fit = fit_side(hl, to, p.shock().u_minus);
    r.fitted_left = -fit.slope;
    r.constant_left = std::exp(fit.intercept);
  }
  return r;
}

}  // namespace tpshock
