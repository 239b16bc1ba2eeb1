#include "tpshock/flux.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <sstream>
#include <utility>

#include "tpshock/error.hpp"

namespace tpshock {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::EqualStates: return "EqualStates";
    case ErrorKind::NoBracket: return "NoBracket";
    case ErrorKind::NotMonotone: return "NotMonotone";
    case ErrorKind::CflViolation: return "CflViolation";
    case ErrorKind::IncomingViolated: return "IncomingViolated";
    case ErrorKind::DomainTooShort: return "DomainTooShort";
    case ErrorKind::NoTransition: return "NoTransition";
    case ErrorKind::NotCoincided: return "NotCoincided";
    case ErrorKind::NonConvexTransformed: return "NonConvexTransformed";
    case ErrorKind::OleinikViolated: return "OleinikViolated";
    case ErrorKind::DegenerateShock: return "DegenerateShock";
    case ErrorKind::NonIncomingMean: return "NonIncomingMean";
    case ErrorKind::TruncationOverflow: return "TruncationOverflow";
    case ErrorKind::NotContracting: return "NotContracting";
    case ErrorKind::NoRoot: return "NoRoot";
    case ErrorKind::DenominatorNearZero: return "DenominatorNearZero";
    case ErrorKind::ShiftDiverged: return "ShiftDiverged";
    case ErrorKind::ConfigInvalid: return "ConfigInvalid";
    case ErrorKind::NonMonotoneErrors: return "NonMonotoneErrors";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

FluxModel::FluxModel(std::string name, Fn f, Fn df, Fn d2f, bool convex, Interval domain_hint,
                     std::optional<double> sonic_point)
    : name_(std::move(name)),
      f_(std::move(f)),
      df_(std::move(df)),
      d2f_(std::move(d2f)),
      convex_(convex),
      domain_(domain_hint),
      sonic_(sonic_point) {}

FluxModel FluxModel::burgers() {
  return FluxModel(
      "burgers", [](double u) { return 0.5 * u * u; }, [](double u) { return u; },
      [](double) { return 1.0; }, true, {-4.0, 4.0}, 0.0);
}

FluxModel FluxModel::quartic() {
  return FluxModel(
      "quartic", [](double u) { return 0.5 * u * u + u * u * u * u / 12.0; },
      [](double u) { return u + u * u * u / 3.0; }, [](double u) { return 1.0 + u * u; }, true,
      {-4.0, 4.0}, 0.0);
}

FluxModel FluxModel::zero() {
  return FluxModel(
      "zero", [](double) { return 0.0; }, [](double) { return 0.0; }, [](double) { return 0.0; },
      false, {-4.0, 4.0});
}

FluxModel FluxModel::by_name(const std::string& name) {
  if (name == "burgers") return burgers();
  if (name == "quartic") return quartic();
  if (name == "zero") return zero();
  throw Error(ErrorKind::ConfigInvalid, "unknown flux '" + name + "'");
}

double FluxModel::inverse_d1(double slope) const {
  if (!convex_) throw Error(ErrorKind::NotMonotone, "inverse of f' needs a convex flux");
  // f' is strictly increasing; expand a bracket then bisect/Newton.
  double lo = -1.0, hi = 1.0;
  while (df_(lo) > slope) lo *= 2.0;
  while (df_(hi) < slope) hi *= 2.0;
  double u = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double r = df_(u) - slope;
    if (r > 0) hi = u; else lo = u;
    const double d = d2f_(u);
    double next = u - r / d;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - u) <= 1e-15 * (1.0 + std::abs(u))) return next;
    u = next;
  }
  return u;
}

double shock_speed(const FluxModel& flux, double u_minus, double u_plus) {
  if (std::abs(u_minus - u_plus) < kStateTolerance)
    throw Error(ErrorKind::EqualStates, "shock states coincide");
  return (flux(u_plus) - flux(u_minus)) / (u_plus - u_minus);
}

ShockData make_shock(const FluxModel& flux, double u_minus, double u_plus) {
  return {u_minus, u_plus, shock_speed(flux, u_minus, u_plus)};
}

bool check_lax(const FluxModel& flux, const ShockData& shock) {
  const double s = shock.speed;
  return flux.d1(shock.u_plus) + kStateTolerance < s && s + kStateTolerance < flux.d1(shock.u_minus);
}

double oleinik_f0(const FluxModel& flux, const ShockData& shock, double phi, Anchor anchor) {
  const double ua = anchor == Anchor::Plus ? shock.u_plus : shock.u_minus;
  return -shock.speed * (phi - ua) + flux(phi) - flux(ua);
}

double averaged_speed(const FluxModel& flux, double u, double v) {
  using boost::math::quadrature::gauss;
  return gauss<double, 16>::integrate([&](double th) { return flux.d1(v + th * (u - v)); }, 0.0,
                                      1.0);
}

double inverse_on_incoming_branch(const FluxModel& flux, double y, Interval bracket) {
  double lo = bracket.lo, hi = bracket.hi;
  if (!(lo < hi)) throw Error(ErrorKind::NoBracket, "empty bracket");
  if (flux.d1(lo) >= 0.0 || flux.d1(hi) >= 0.0 || flux.d1(0.5 * (lo + hi)) >= 0.0) {
    std::ostringstream os;
    os << "f' changes sign inside [" << lo << ", " << hi << "]";
    throw Error(ErrorKind::NotMonotone, os.str());
  }
  // f is decreasing on the bracket: f(lo) >= y >= f(hi).
  const double flo = flux(lo) - y, fhi = flux(hi) - y;
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if (flo < 0.0 || fhi > 0.0) {
    std::ostringstream os;
    os << "y=" << y << " not straddled by f on [" << lo << ", " << hi << "]";
    throw Error(ErrorKind::NoBracket, os.str());
  }
  double u = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double r = flux(u) - y;
    if (r > 0.0) lo = u; else hi = u;
    double next = u - r / flux.d1(u);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - u) <= 1e-13 || hi - lo <= 1e-13) return next;
    u = next;
  }
  return u;
}

}  // namespace tpshock
