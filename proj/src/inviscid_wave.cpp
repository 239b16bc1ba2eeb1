#include "tpshock/inviscid_wave.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "tpshock/error.hpp"
#include "tpshock/numerics.hpp"

namespace tpshock {

TransformedProblem::TransformedProblem(FluxModel flux, PeriodicSignal ub, double delta_b)
    : flux_(std::move(flux)), ub_(std::move(ub)) {
  check_incoming(flux_, ub_, delta_b, 64);
  double vmin = std::numeric_limits<double>::infinity(), vmax = -vmin;
  double dgmax = 0.0;
  for (double u : ub_.samples()) {
    vmin = std::min(vmin, -flux_(u));
    vmax = std::max(vmax, -flux_(u));
    dgmax = std::max(dgmax, -1.0 / flux_.d1(u));
  }
  v_min_ = vmin;
  v_max_ = vmax;
  dg_bound_ = dgmax;
  // Bracket for the branch inversion: widen the data range while f' stays negative.
  const double umin = ub_.min_sample(), umax = ub_.max_sample();
  const double pad = 0.25 * (umax - umin) + 1e-3;
  double hi = umax + pad;
  while (flux_.d1(hi) >= -0.5 * delta_b && hi > umax) hi = 0.5 * (hi + umax);
  branch_ = {umin - pad - 1.0, hi};
}

double TransformedProblem::g(double v) const {
  return inverse_on_incoming_branch(flux_, -v, branch_);
}

double TransformedProblem::dg(double v) const { return -1.0 / flux_.d1(g(v)); }

double TransformedProblem::d2g(double v) const {
  const double u = g(v);
  const double fp = flux_.d1(u);
  // d/dv (-1/f'(u)) = f''(u) u'(v) / f'^2, u'(v) = -1/f'.
  return -flux_.d2(u) / (fp * fp * fp);
}

TransformedProblem interchange(const FluxModel& flux, const PeriodicSignal& ub, double delta_b) {
  return TransformedProblem(flux, ub, delta_b);
}

double far_field_state(const FluxModel& flux, const PeriodicSignal& ub) {
  double mean = 0.0;
  for (double u : ub.samples()) mean += flux(u);
  mean /= double(ub.samples().size());
  const double lo = ub.min_sample(), hi = ub.max_sample();
  if (hi - lo < 1e-14) return lo;
  return inverse_on_incoming_branch(flux, mean, {lo, hi});
}

double divide_time(const FluxModel& flux, const PeriodicSignal& ub, std::size_t samples) {
  samples = std::max<std::size_t>(samples, 4096);
  const double ubar = far_field_state(flux, ub);
  const FluxPrimitive prim(flux, ub, ubar);
  const double T = ub.period();
  std::vector<double> p(samples);
  double scale = 0.0;
  for (std::size_t j = 0; j < samples; ++j) {
    p[j] = prim(T * double(j) / double(samples));
    scale = std::max(scale, std::abs(p[j]));
  }
  const double tie = 1e-13 * std::max(1.0, scale) + 1e-15;
  std::size_t arg = 0;
  for (std::size_t j = 1; j < samples; ++j)
    if (p[j] > p[arg] + tie) arg = j;
  if (arg == 0 && p[0] >= *std::max_element(p.begin(), p.end()) - tie) return 0.0;
  const double h = T / double(samples);
  const double a = (double(arg) - 1.0) * h, b = (double(arg) + 1.0) * h;
  double t = golden_minimize([&](double s) { return -prim(s); }, a, b, 1e-13 * T);
  t = std::fmod(t, T);
  if (t < 0) t += T;
  return t;
}

InviscidWaveField::InviscidWaveField(FluxModel flux, PeriodicSignal ub, double u_bar_plus,
                                     double t_b, int foot_samples_per_period)
    : flux_(std::move(flux)),
      ub_(std::move(ub)),
      primitive_(flux_, ub_, u_bar_plus),
      u_bar_plus_(u_bar_plus),
      t_b_(t_b),
      foot_samples_(foot_samples_per_period) {
  slope_lo_ = flux_.d1(ub_.min_sample());
  slope_hi_ = flux_.d1(ub_.max_sample());
}

// Hopf-Lax cost of the transformed problem written in the original variables, for a backward
// characteristic from (x, t) to the boundary point (0, y):
//   -int_0^y f(u_b) - (t - y) f(u_y) - |x| u_y,  with f'(u_y) = x / (t - y).
// The f(u_bar_plus) drift is subtracted from both terms so values stay O(1).
double InviscidWaveField::cost(double x, double t, double y) const {
  const double tau = t - y;
  const double u = flux_.inverse_d1(x / tau);
  const double fb = flux_(u_bar_plus_);
  return -primitive_(y) - tau * (flux_(u) - fb) - std::abs(x) * (u - u_bar_plus_);
}

double InviscidWaveField::foot_time(double x, double t) const {
  // Admissible elapsed times: the characteristic slope x/tau must be a boundary slope.
  const double tau_lo = std::abs(x) / std::abs(slope_lo_);
  const double tau_hi = std::abs(x) / std::abs(slope_hi_);
  const double T = ub_.period();
  if (tau_hi - tau_lo < 1e-14 * (1.0 + tau_hi)) return t - tau_lo;
  const double h = T / double(foot_samples_);
  const std::size_t n = static_cast<std::size_t>(std::ceil((tau_hi - tau_lo) / h)) + 1;
  const double step = (tau_hi - tau_lo) / double(n - 1);
  std::vector<double> c(n);
  for (std::size_t i = 0; i < n; ++i) c[i] = cost(x, t, t - (tau_lo + step * double(i)));
  // Refine the two best local minima; near a shock of u+ they compete.
  std::size_t best = 0, second = n;
  for (std::size_t i = 1; i < n; ++i)
    if (c[i] < c[best]) best = i;
  for (std::size_t i = 0; i < n; ++i) {
    if (i == best) continue;
    const bool local = (i == 0 || c[i] <= c[i - 1]) && (i + 1 == n || c[i] <= c[i + 1]);
    if (local && (second == n || c[i] < c[second]) &&
        (i + 1 < best || i > best + 1))
      second = i;
  }
  auto refine = [&](std::size_t i) {
    const double a = tau_lo + step * double(i == 0 ? 0 : i - 1);
    const double b = tau_lo + step * double(std::min(i + 1, n - 1));
    const double tau = golden_minimize([&](double s) { return cost(x, t, t - s); }, a, b,
                                       1e-13 * (1.0 + b));
    return std::pair{tau, cost(x, t, t - tau)};
  };
  auto [tau1, c1] = refine(best);
  if (second < n) {
    auto [tau2, c2] = refine(second);
    if (c2 < c1) tau1 = tau2;
  }
  return t - tau1;
}

double InviscidWaveField::operator()(double x, double t) const {
  if (x >= 0.0) return ub_(t);
  const double y = foot_time(x, t);
  return flux_.inverse_d1(x / (t - y));
}

double InviscidWaveField::sup_deviation(double x, std::size_t t_samples) const {
  const double T = ub_.period();
  double worst = 0.0;
  for (std::size_t j = 0; j < t_samples; ++j)
    worst = std::max(worst, std::abs((*this)(x, T * double(j) / double(t_samples)) - u_bar_plus_));
  return worst;
}

double InviscidWaveField::flux_average(double x, double tol) const {
  // u+(x, .) is smooth between jumps of the foot time. Locate each jump by bisection on the foot,
  // then integrate the smooth pieces by Gauss-Legendre.
  const double T = ub_.period();
  const std::size_t n = 256;
  std::vector<double> ts(n + 1), ys(n + 1);
  for (std::size_t j = 0; j <= n; ++j) {
    ts[j] = T * double(j) / double(n);
    ys[j] = foot_time(x, ts[j]);
  }
  std::vector<double> inc(n);
  for (std::size_t j = 0; j < n; ++j) inc[j] = ys[j + 1] - ys[j];
  std::vector<double> breaks{0.0};
  for (std::size_t j = 0; j < n; ++j) {
    const double left = inc[j == 0 ? n - 1 : j - 1], right = inc[j + 1 == n ? 0 : j + 1];
    if (inc[j] <= 2.0 * std::min(left, right) + 1e-12 * T) continue;
    double a = ts[j], b = ts[j + 1], ya = ys[j], yb = ys[j + 1];
    for (int it = 0; it < 60 && b - a > 1e-14 * T; ++it) {
      const double m = 0.5 * (a + b);
      const double ym = foot_time(x, m);
      if (ym - ya > yb - ym) {
        b = m;
        yb = ym;
      } else {
        a = m;
        ya = ym;
      }
    }
    if (yb - ya > 1e-9 * T) breaks.push_back(0.5 * (a + b));
  }
  breaks.push_back(T);
  double acc = 0.0;
  auto fu = [&](double t) { return flux_((*this)(x, t)); };
  for (std::size_t b = 0; b + 1 < breaks.size(); ++b) {
    const double lo = breaks[b], hi = breaks[b + 1];
    const int pieces = std::max(1, int(std::ceil(32.0 * (hi - lo) / T)));
    for (int p = 0; p < pieces; ++p)
      acc += gauss_legendre_16(fu, lo + (hi - lo) * p / pieces, lo + (hi - lo) * (p + 1) / pieces);
  }
  (void)tol;
  return acc;
}

InviscidWaveField solve_wave(const FluxModel& flux, const PeriodicSignal& ub,
                             const std::vector<double>& x_eval, double delta_b) {
  const TransformedProblem problem = interchange(flux, ub, delta_b);
  // g must be convex on the data range.
  for (std::size_t j = 0; j <= 64; ++j) {
    const double v = problem.v_min() + (problem.v_max() - problem.v_min()) * double(j) / 64.0;
    if (problem.d2g(v) <= 0.0) {
      std::ostringstream os;
      os << "g''(" << v << ") <= 0";
      throw Error(ErrorKind::NonConvexTransformed, os.str());
    }
  }
  InviscidWaveField wave(flux, ub, far_field_state(flux, ub), divide_time(flux, ub));
  if (!x_eval.empty()) {
    double c = 0.0;
    for (double x : x_eval) c = std::max(c, std::abs(x) * wave.sup_deviation(x, 256));
    wave.set_decay_constant(c);
  }
  return wave;
}

std::vector<std::vector<double>> godunov_wave(const TransformedProblem& problem,
                                              const std::vector<double>& x_probes,
                                              std::size_t cells, double cfl) {
  const double T = problem.period();
  const double h = T / double(cells);
  std::vector<double> v(cells), next(cells), fl(cells);
  static constexpr double gp[2] = {-0.5773502691896257, 0.5773502691896257};
  for (std::size_t j = 0; j < cells; ++j) {
    const double c = (double(j) + 0.5) * h;
    // Two-point Gauss average of v0 over the cell.
    v[j] = 0.5 * (problem.v0(c + 0.5 * h * gp[0]) + problem.v0(c + 0.5 * h * gp[1]));
  }
  std::vector<std::size_t> order(x_probes.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return std::abs(x_probes[a]) < std::abs(x_probes[b]); });
  std::vector<std::vector<double>> out(x_probes.size());
  // g' > 0, so the Godunov flux is upwind from the left: F_{j+1/2} = g(v_j). g is tabulated with
  // cubic Hermite interpolation; the scheme keeps v inside [v_min, v_max].
  const std::size_t nodes = 4096;
  const double vlo = problem.v_min(), vhi = problem.v_max();
  const double hv = std::max(vhi - vlo, 1e-300) / double(nodes);
  std::vector<double> gt(nodes + 1), dgt(nodes + 1);
  for (std::size_t i = 0; i <= nodes; ++i) {
    gt[i] = problem.g(vlo + hv * double(i));
    dgt[i] = problem.dg(vlo + hv * double(i)) * hv;
  }
  auto g_fast = [&](double vv) {
    if (vhi - vlo < 1e-14) return gt[0];
    const double r = std::clamp((vv - vlo) / hv, 0.0, double(nodes));
    const std::size_t i = std::min<std::size_t>(std::size_t(r), nodes - 1);
    const double s = r - double(i), s2 = s * s, s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * gt[i] + (s3 - 2 * s2 + s) * dgt[i] +
           (-2 * s3 + 3 * s2) * gt[i + 1] + (s3 - s2) * dgt[i + 1];
  };
  const double dt_max = cfl * h / problem.dg_bound();
  double tt = 0.0;
  for (std::size_t idx : order) {
    const double target = std::abs(x_probes[idx]);
    while (tt < target - 1e-14) {
      const double dt = std::min(dt_max, target - tt);
      for (std::size_t j = 0; j < cells; ++j) fl[j] = g_fast(v[j]);
      for (std::size_t j = 0; j < cells; ++j) {
        const std::size_t jm = j == 0 ? cells - 1 : j - 1;
        next[j] = v[j] - dt / h * (fl[j] - fl[jm]);
      }
      v.swap(next);
      tt += dt;
    }
    auto& col = out[idx];
    col.resize(cells);
    for (std::size_t j = 0; j < cells; ++j) col[j] = g_fast(v[j]);
  }
  return out;
}

DecayDiagnostic decay_diagnostic(const InviscidWaveField& wave, const std::vector<double>& x_probes,
                                 std::size_t t_samples) {
  DecayDiagnostic d;
  for (double x : x_probes) {
    d.distances.push_back(std::abs(x));
    d.deviations.push_back(wave.sup_deviation(x, t_samples));
  }
  const double peak = *std::max_element(d.deviations.begin(), d.deviations.end());
  if (peak < 1e-12 || x_probes.size() < 5) {
    d.degenerate = true;
    return d;
  }
  const RateFit fit = fit_loglog(d.distances, d.deviations);
  d.slope = fit.slope;
  d.constant = std::exp(fit.intercept);
  d.r_squared = fit.r_squared;
  return d;
}

}  // namespace tpshock
