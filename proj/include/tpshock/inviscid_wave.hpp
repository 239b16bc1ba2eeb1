#pragma once

#include <optional>
#include <vector>

#include "tpshock/flux.hpp"
#include "tpshock/inviscid.hpp"
#include "tpshock/signal.hpp"

namespace tpshock {

/// Space-periodic Cauchy problem obtained by swapping the roles of x and t:
/// v(x~, t~) = -f(u(-t~, x~)), v0 = -f(u_b), transformed flux g(v) = f^{-1}(-v) on the incoming
/// branch.
class TransformedProblem {
 public:
  TransformedProblem(FluxModel flux, PeriodicSignal ub, double delta_b);

  double v0(double xt) const { return -flux_(ub_(xt)); }
  /// g(v) = f^{-1}(-v) restricted to [v_min, v_max] (evaluated slightly beyond for robustness).
  double g(double v) const;
  /// g'(v) = -1 / f'(g(v)).
  double dg(double v) const;
  double d2g(double v) const;
  /// Inverse map back to the original variables: u = g(v).
  double to_state(double v) const { return g(v); }

  double v_min() const { return v_min_; }
  double v_max() const { return v_max_; }
  /// Bound on g'(v0); equals 1/delta_b at worst under the incoming condition.
  double dg_bound() const { return dg_bound_; }
  double period() const { return ub_.period(); }
  const FluxModel& flux() const { return flux_; }
  const PeriodicSignal& boundary() const { return ub_; }

 private:
  FluxModel flux_;
  PeriodicSignal ub_;
  double v_min_, v_max_;
  double dg_bound_;
  Interval branch_;
};

/// Throws IncomingViolated if f'(u_b) >= -delta_b somewhere.
TransformedProblem interchange(const FluxModel& flux, const PeriodicSignal& ub,
                               double delta_b = 0.1);

/// Time-periodic inviscid boundary wave u+(x, t), evaluated by the Lax-Oleinik formula of the
/// transformed problem.
class InviscidWaveField {
 public:
  InviscidWaveField(FluxModel flux, PeriodicSignal ub, double u_bar_plus, double t_b,
                    int foot_samples_per_period = 64);

  /// u+(x, t) for x < 0; returns u_b(t) at x = 0.
  double operator()(double x, double t) const;
  /// Foot (boundary time) of the backward characteristic through (x, t).
  double foot_time(double x, double t) const;
  double sup_deviation(double x, std::size_t t_samples = 512) const;
  /// Integral over one period of f(u+(x, .)), adaptive quadrature that resolves the jumps.
  double flux_average(double x, double tol = 1e-11) const;

  double u_bar_plus() const { return u_bar_plus_; }
  double divide_time() const { return t_b_; }
  double period() const { return ub_.period(); }
  std::optional<double> decay_constant() const { return c_fit_; }
  void set_decay_constant(double c) { c_fit_ = c; }

 private:
  double cost(double x, double t, double y) const;

  FluxModel flux_;
  PeriodicSignal ub_;
  FluxPrimitive primitive_;  // of f(u_b) - f(u_bar_plus)
  double u_bar_plus_;
  double t_b_;
  int foot_samples_;
  double slope_lo_, slope_hi_;  // f' range over the boundary data
  std::optional<double> c_fit_;
};

/// u_bar_plus = f^{-1}(T^{-1} int f(u_b)) on the incoming branch.
double far_field_state(const FluxModel& flux, const PeriodicSignal& ub);

/// Smallest maximiser in [0, T) of int_0^t (f(u_b) - f(u_bar_plus)).
double divide_time(const FluxModel& flux, const PeriodicSignal& ub,
                   std::size_t samples = 4096);

/// Builds the wave (Lax-Oleinik back end) and fits C in sup_t |u+ - u_bar_plus| <= C/|x| over
/// `x_eval` (if non-empty).
InviscidWaveField solve_wave(const FluxModel& flux, const PeriodicSignal& ub,
                             const std::vector<double>& x_eval = {}, double delta_b = 0.1);

/// Independent back end: Godunov on one period of the transformed problem with periodic
/// boundaries, marched to t~ = |x| for each probe. Returns u+ at `cells` equally spaced cell
/// centres t_j = (j + 1/2) T / cells for every probe.
std::vector<std::vector<double>> godunov_wave(const TransformedProblem& problem,
                                              const std::vector<double>& x_probes,
                                              std::size_t cells = 512, double cfl = 0.8);

struct DecayDiagnostic {
  std::vector<double> distances;   // |x|
  std::vector<double> deviations;  // sup_t |u+(x, .) - u_bar_plus|
  double slope = 0.0;
  double constant = 0.0;  // exp(intercept)
  double r_squared = 0.0;
  bool degenerate = false;
};

DecayDiagnostic decay_diagnostic(const InviscidWaveField& wave, const std::vector<double>& x_probes,
                                 std::size_t t_samples = 512);

}  // namespace tpshock
