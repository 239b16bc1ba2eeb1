#pragma once

#include <functional>
#include <optional>
#include <string>

namespace tpshock {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double width() const { return hi - lo; }
  bool contains(double u) const { return u >= lo && u <= hi; }
};

/// Flux f with its first two derivatives.
///
/// Convex fluxes also carry the sonic point (where f' vanishes), which the
/// exact Riemann solver needs to locate the minimum of f over an interval.
class FluxModel {
 public:
  using Fn = std::function<double(double)>;

  FluxModel(std::string name, Fn f, Fn df, Fn d2f, bool convex, Interval domain_hint,
            std::optional<double> sonic_point = std::nullopt);

  /// f(u) = u^2/2
  static FluxModel burgers();
  /// f(u) = u^2/2 + u^4/12
  static FluxModel quartic();
  /// f = 0; turns the viscous solver into the heat equation.
  static FluxModel zero();
  /// Lookup by the names used in experiment configs ("burgers", "quartic", "zero").
  static FluxModel by_name(const std::string& name);

  double eval(double u) const { return f_(u); }
  double d1(double u) const { return df_(u); }
  double d2(double u) const { return d2f_(u); }
  double operator()(double u) const { return f_(u); }

  const std::string& name() const { return name_; }
  bool convex() const { return convex_; }
  const Interval& domain_hint() const { return domain_; }
  std::optional<double> sonic_point() const { return sonic_; }

  /// Inverse of f' (requires a convex flux, so f' is strictly increasing).
  double inverse_d1(double slope) const;

 private:
  std::string name_;
  Fn f_;
  Fn df_;
  Fn d2f_;
  bool convex_;
  Interval domain_;
  std::optional<double> sonic_;
};

struct ShockData {
  double u_minus = 0.0;
  double u_plus = 0.0;
  double speed = 0.0;

  double jump() const { return u_plus - u_minus; }
};

inline constexpr double kStateTolerance = 1e-12;

/// Rankine-Hugoniot speed. Throws EqualStates when the states coincide.
double shock_speed(const FluxModel& flux, double u_minus, double u_plus);

ShockData make_shock(const FluxModel& flux, double u_minus, double u_plus);

/// Strict Lax inequalities f'(u+) < s < f'(u-), with margin above kStateTolerance.
bool check_lax(const FluxModel& flux, const ShockData& shock);

enum class Anchor { Plus, Minus };

/// f0(phi) = -s (phi - u_anchor) + f(phi) - f(u_anchor).
double oleinik_f0(const FluxModel& flux, const ShockData& shock, double phi,
                  Anchor anchor = Anchor::Plus);

/// Integral of f'(v + theta (u - v)) over theta in [0, 1], 16-point Gauss-Legendre.
double averaged_speed(const FluxModel& flux, double u, double v);

/// Unique u in the bracket with f(u) = y where f' < 0 (bisection safeguarded Newton).
double inverse_on_incoming_branch(const FluxModel& flux, double y, Interval bracket);

}  // namespace tpshock
