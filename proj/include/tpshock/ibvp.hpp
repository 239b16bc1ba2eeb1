#pragma once

#include <optional>
#include <vector>

#include "tpshock/flux.hpp"
#include "tpshock/grid_solution.hpp"
#include "tpshock/inviscid.hpp"
#include "tpshock/profile.hpp"
#include "tpshock/signal.hpp"
#include "tpshock/viscous_wave.hpp"

namespace tpshock {

enum class LeftBoundary {
  Pinned,   // u(x_left, t) = u_left
  Neumann,  // u_x(x_left, t) = 0, outflow for the advective part
};

struct ViscousConfig {
  double x_left = -60.0;
  double dx = 0.05;
  double t_end = 10.0;
  double dt = 0.0;    // 0: largest step with advective CFL <= cfl that divides snapshot_dt
  double cfl = 0.4;
  double snapshot_dt = 1.0;
  double u_left = 0.0;
  LeftBoundary left = LeftBoundary::Pinned;
  double delta_b = 0.1;
  bool check_incoming = true;
  std::optional<double> required_x_left;  // DomainTooShort if x_left lies right of this
};

inline constexpr double kMaxViscousCfl = 0.5;

/// Vertex-centred solver for u_t + f(u)_x = u_xx on [x_left, 0]. Each step is Strang-composed:
/// advection over dt/2 (Engquist-Osher flux, van Leer MUSCL, SSP-RK2), Crank-Nicolson diffusion
/// over dt, advection over dt/2. Node M = 0 carries u_b(t).
///
/// The discrete mass is the sum over the dual cells of the updated nodes, so the recorded
/// boundary fluxes balance it to rounding.
class ViscousStepper {
 public:
  ViscousStepper(const FluxModel& flux, const Profile& u0, const PeriodicSignal& ub,
                 const ViscousConfig& cfg);

  double time() const { return t_; }
  double dt() const { return dt_; }
  std::size_t steps_total() const { return steps_total_; }
  std::size_t steps_per_snapshot() const { return steps_per_snapshot_; }
  bool done() const { return step_ >= steps_total_; }
  const std::vector<double>& x() const { return rec_.x; }
  const std::vector<double>& u() const { return u_; }

  void step();
  /// Third-order one-sided u_x(0, t).
  double boundary_slope() const;
  double mass() const;
  /// Appends the current state to the record.
  void snapshot();
  const GridSolution& record() const { return rec_; }
  GridSolution take_record() { return std::move(rec_); }

 private:
  void advect(double t0, double tau, double& left_flux, double& right_flux);
  void rhs(const std::vector<double>& u, std::vector<double>& out, double& fl, double& fr);
  void diffuse(double t0, double dt, double& left_flux, double& right_flux);
  double numerical_flux(double a, double b) const;

  FluxModel flux_;
  PeriodicSignal ub_;
  ViscousConfig cfg_;
  double t_ = 0.0, dt_ = 0.0;
  std::size_t step_ = 0, steps_total_ = 0, steps_per_snapshot_ = 1;
  std::vector<double> u_, stage_, work_, slope_;
  std::vector<double> lo_, di_, up_, rhs_;
  GridSolution rec_;
};

/// Runs the stepper to t_end with snapshots every snapshot_dt. Throws CflViolation when the
/// advective CFL exceeds 0.5, DomainTooShort when x_left > required_x_left, IncomingViolated for
/// boundary data that are not incoming (unless check_incoming is off).
GridSolution solve_viscous(const FluxModel& flux, const Profile& u0, const PeriodicSignal& ub,
                           const ViscousConfig& cfg);

/// u# = u_minus (1 - sigma_X) + u+ sigma_X on fixed nodes, with sigma_X(x, t) = sigma(x - s t - X).
/// Holds references: the profile and the wave must outlive it.
class Ansatz {
 public:
  Ansatz(const ShockProfile& profile, const SpectralWave& wave, std::vector<double> nodes);

  const std::vector<double>& nodes() const { return nodes_; }
  const ShockProfile& profile() const { return profile_; }
  double u_minus() const { return profile_.shock().u_minus; }
  double u_plus() const { return wave_.u_bar_plus(); }
  double speed() const { return profile_.shock().speed; }
  /// First node inside the support of the wave oscillation.
  std::size_t wave_begin() const { return first_; }

  /// u+ and u+_x at every node.
  void wave(double t, std::vector<double>& u, std::vector<double>& ux) const;
  void evaluate(double t, double shift, std::vector<double>& out) const;
  /// phi_X + u+ - u_bar_plus.
  void superposition(double t, double shift, std::vector<double>& out) const;

 private:
  const ShockProfile& profile_;
  const SpectralWave& wave_;
  std::vector<double> nodes_;
  std::size_t first_ = 0;
  WaveSampler sampler_;
};

/// X0 with trapezoid over nodes of (u0 - u#(., 0; X0)) = 0, by bisection on
/// [x_left + margin, -margin], margin = 10 / theta_s. Throws NoRoot if the bracket does not
/// straddle zero.
double initial_shift(const Profile& u0, const Ansatz& ansatz, double tol = 1e-10);
/// Same with the data given at the ansatz nodes.
double initial_shift(const std::vector<double>& data, const Ansatz& ansatz, double tol = 1e-10);

struct ShiftRhs {
  double group_i = 0.0;    // f(u_bar_plus) - f(phi_X(0)) - u_x(0) + u#_x(0)
  double group_ii = 0.0;   // int (-(u+ - u_bar_plus) s + f(u+) - f(u_bar_plus) - u+_x) sigma_X'
  double group_iii = 0.0;  // ((f(u_b) - f(u_bar_plus))(1 - sigma_X) - (u_b - u_bar_plus) sigma_X')(0)
  double denominator = 0.0;  // int (u+ - u_minus) sigma_X'
  double unperturbed = 0.0;  // (u_bar_plus - u_minus) int sigma_X'
  double rate = 0.0;
};

/// dX/dt from the mass condition. Throws DenominatorNearZero when |denominator| falls below half
/// of |unperturbed|.
ShiftRhs shift_rhs(const FluxModel& flux, const Ansatz& ansatz, double t, double shift,
                   double boundary_slope);

struct CoupledConfig {
  ViscousConfig grid;
  double tol_shift = 0.02;        // |X(t_end) - X(t_end / 2)|
  double gap_fraction = 0.1;      // final / initial superposition gap
  double drift_factor = 1e-4;     // mass defect bound in units of |[u]|
  double domain_margin = 60.0;    // x_left <= final shock - domain_margin / theta_s
  double resolution = 20.0;       // cells per 1 / theta_s, rounded to the nearest cell
  double gap_floor = 1e-13;       // ansatz gap samples below this are not fitted
  /// Boundary slope fed to the shift equation: true derives it from the scheme's step-averaged
  /// boundary fluxes (mass-consistent), false uses the one-sided stencil.
  bool scheme_boundary_flux = true;
};

struct ShiftState {
  double x0 = 0.0;
  std::vector<double> times, shift, rate, mass_defect;
  std::vector<double> slope_mismatch;  // stencil u_x(0) - u#_x(0)
};

struct AntiDerivative {
  std::vector<double> times;
  std::vector<std::vector<double>> values;  // U at the solver nodes, per snapshot
  std::vector<double> left, right;          // U(x_left, t), U(0, t)
  std::vector<double> weighted_norm;        // (int (1 + |x|) U^2)^{1/2}
};

struct CoupledVerdict {
  double shift_change = 0.0;
  double gap_initial = 0.0, gap_final = 0.0;
  double max_defect = 0.0, drift_bound = 0.0;
  double ansatz_gap_slope = 0.0, ansatz_gap_r2 = 0.0;
  bool shift_converged = false, gap_decayed = false, defect_bounded = false;
  bool ansatz_gap_linear = false;
  bool pass() const { return shift_converged && gap_decayed && defect_bounded; }
};

struct CoupledResult {
  GridSolution solution;
  ShiftState shift;
  AntiDerivative anti;
  std::vector<std::vector<double>> u_sharp;  // per snapshot
  std::vector<double> superposition_gap;     // sup |u - (phi_X + u+ - u_bar_plus)| per snapshot
  std::vector<double> ansatz_gap;            // sup |u# - (phi_X + u+ - u_bar_plus)| per snapshot
  double theta_s = 0.0;
  CoupledVerdict verdict;
};

/// Co-integrates the viscous IBVP and the shift ODE (Heun, same step). The profile must connect
/// u_minus to the wave's far-field state. Throws ShiftDiverged if s t + X leaves the domain,
/// DomainTooShort / InvalidArgument if the grid cannot hold or resolve the shock.
CoupledResult run_coupled(const FluxModel& flux, const Profile& u0, const PeriodicSignal& ub,
                          const ShockProfile& profile, const SpectralWave& wave,
                          const CoupledConfig& cfg);

/// Cumulative trapezoid of (u - u#) from the left end.
std::vector<double> anti_derivative(const std::vector<double>& x, const std::vector<double>& u,
                                    const std::vector<double>& u_sharp);

struct WaveMarchReport {
  double l2_difference = 0.0;   // ((1/T) int_0^T int |u - u+|^2 dx dt)^{1/2} over the last period
  double sup_difference = 0.0;
  double period_drift = 0.0;    // sup |u(t) - u(t - T)| over the last period
  std::size_t samples = 0;
};

/// Marches u_t + f(u)_x = u_xx on the wave's own interval from u = mean(u_b), Neumann at the left
/// end, for `periods` periods and compares the last period with the spectral wave.
WaveMarchReport compare_wave_march(const FluxModel& flux, const SpectralWave& wave,
                                   const PeriodicSignal& ub, double dx, int periods,
                                   int samples_per_period = 32);

}  // namespace tpshock
