#pragma once

#include <optional>
#include <vector>

#include "tpshock/flux.hpp"

namespace tpshock {

struct ProfileOptions {
  double tol = 1e-12;          // dopri5 absolute and relative tolerance
  double xi_range = 0.0;       // 0: 60 / theta_s
  std::size_t nodes_per_side = 4000;
  double handoff = 1e-8;       // switch to the linearized tail below this distance to the end state
  std::optional<double> anchor;  // phi(0); default is the midpoint of the end states
};

/// Viscous shock profile phi' = f0(phi), phi(-inf) = u_minus, phi(+inf) = u_plus, tabulated on a
/// sinh-stretched grid. Evaluation uses cubic Hermite interpolation with the exact slopes inside
/// the table and the linearized exponential tails outside it.
class ShockProfile {
 public:
  const FluxModel& flux() const { return flux_; }
  const ShockData& shock() const { return shock_; }

  const std::vector<double>& xi() const { return xi_; }
  const std::vector<double>& phi() const { return phi_; }
  const std::vector<double>& dphi() const { return dphi_; }
  const std::vector<double>& sigma() const { return sigma_; }

  double operator()(double xi) const { return value(xi); }
  double value(double xi) const;
  double derivative(double xi) const;
  /// (phi - u_minus) / (u_plus - u_minus).
  double sigma_at(double xi) const;
  double dsigma_at(double xi) const;
  /// (f(phi) - f(u_minus) - phi') / (f(u_plus) - f(u_minus)) at node i; nullopt when the flux jump
  /// vanishes (s = 0).
  std::optional<double> sigma_flux_form(std::size_t i) const;

  /// f'(u_minus) - s and s - f'(u_plus): linearized decay rates toward each end state.
  double rate_left() const { return rate_left_; }
  double rate_right() const { return rate_right_; }
  double theta() const { return std::min(rate_left_, rate_right_); }

  /// max over table intervals of |phi(xi_{i+1}) - phi(xi_i) - int f0(phi)|, the integral form of
  /// the ODE residual evaluated with 5-point Gauss on the interpolant.
  double max_integral_residual() const;
  /// Indices of the first tail node on each side (where the linearized continuation starts).
  std::size_t handoff_left() const { return handoff_left_; }
  std::size_t handoff_right() const { return handoff_right_; }

 private:
  friend ShockProfile solve_profile(const FluxModel&, const ShockData&, const ProfileOptions&);
  ShockProfile(FluxModel flux, ShockData shock) : flux_(std::move(flux)), shock_(shock) {}
  std::size_t locate(double xi) const;

  FluxModel flux_;
  ShockData shock_;
  std::vector<double> xi_, phi_, dphi_, sigma_;
  double rate_left_ = 0.0, rate_right_ = 0.0;
  std::size_t handoff_left_ = 0, handoff_right_ = 0;
};

/// Throws DegenerateShock if f'(u_minus) or f'(u_plus) equals s within tolerance, OleinikViolated
/// if f0 has an interior zero or the wrong sign on the open interval between the end states.
ShockProfile solve_profile(const FluxModel& flux, const ShockData& shock,
                           const ProfileOptions& opt = {});

struct TailRates {
  double fitted_left = 0.0, fitted_right = 0.0;
  double predicted_left = 0.0, predicted_right = 0.0;
  double constant_left = 0.0, constant_right = 0.0;  // |phi - u| ~ C exp(-theta |xi|)
};

/// Fits log|phi - u_end| against xi over the outer 25% of each side's integrated (pre-handoff)
/// segment.
TailRates tail_rates(const ShockProfile& profile);

}  // namespace tpshock
