#pragma once

#include <functional>
#include <string>
#include <vector>

#include "tpshock/flux.hpp"
#include "tpshock/grid_solution.hpp"
#include "tpshock/numerics.hpp"
#include "tpshock/signal.hpp"

namespace tpshock {

class InviscidWaveField;

using Profile = std::function<double(double)>;

enum class RightBoundary {
  Signal,   // ghost cell carries u_b(t_n + dt/2)
  Outflow,  // zero-gradient ghost; whole-line sanity runs
};

struct InviscidConfig {
  double x_left = -60.0;
  double x_right = 0.0;
  double dx = 0.02;
  double t_end = 10.0;
  double cfl = 0.8;
  double snapshot_dt = 0.1;
  double u_left = 0.0;       // far-field state carried by the left ghost cell
  double delta_b = 0.1;      // incoming margin: f'(u_b) < -delta_b
  int incoming_samples = 64; // per period
  bool require_incoming_initial = false;  // enforce f'(u0) < 0
  int edge_margin_cells = 50;
  RightBoundary right = RightBoundary::Signal;
};

/// Godunov scheme with the exact convex-flux Riemann solver.
GridSolution solve_inviscid(const FluxModel& flux, const Profile& u0, const PeriodicSignal& ub,
                            const InviscidConfig& cfg);

/// Godunov flux of a convex flux: min of f over [a, b] if a <= b, max over [b, a] otherwise.
double godunov_flux(const FluxModel& flux, double a, double b);

/// Throws IncomingViolated when f'(u_b(t)) >= -delta_b at any of `samples` times per period.
void check_incoming(const FluxModel& flux, const PeriodicSignal& ub, double delta_b,
                    int samples = 64);

struct ShockTrajectory {
  std::vector<double> times;
  std::vector<double> positions;
  std::string method = "conservative-interface";
};

/// Conservative-interface shock location in every snapshot.
ShockTrajectory track_shock(const GridSolution& sol, const ShockData& shock);
/// Location in a single state vector.
double locate_shock(const GridSolution& sol, const std::vector<double>& u, const ShockData& shock);

/// max over [0, T] of the primitive of f(u_b) - f(u_bar_plus); computed from the Fourier series
/// of f(u_b) so the primitive is exact for band-limited data.
class FluxPrimitive {
 public:
  FluxPrimitive(const FluxModel& flux, const PeriodicSignal& ub, double u_bar_plus,
                std::size_t samples = 4096);
  double operator()(double t) const;
  double mean_excess() const { return mean_excess_; }
  double period() const { return period_; }

 private:
  double period_;
  double mean_excess_;  // mean of f(u_b) - f(u_bar_plus)
  std::vector<std::pair<int, cplx>> modes_;
};

/// (1/[u]) { -int (u0 - u_minus) dy + max_t int_0^t (f(u_b) - f(u_plus)) dtau }, integrals over
/// [x_left, 0] and one period.
double predicted_final_shift(const FluxModel& flux, const Profile& u0, const PeriodicSignal& ub,
                             const ShockData& shock, double x_left);

struct ShiftDecay {
  std::vector<double> dx;                 // dx, dx / 2, dx / 4
  std::vector<double> times;
  std::vector<std::vector<double>> raw;   // X(t) - s t - X_inf per grid
  std::vector<double> extrapolated;       // Richardson combination of the two finest grids
  double order = 0.0;                     // observed order of the grid bias
  std::vector<double> window_times, envelope;  // max |extrapolated| per window
  RateFit fit;                            // log envelope vs log t
};

/// Decay of X(t) - s t - x_inf over [t_from, t_to]. The single-grid deviation has an O(dx^p)
/// floor from the smeared boundary wave, so the run is repeated on dx, dx/2, dx/4, the bias is
/// removed by Richardson extrapolation with the observed p, and the envelope (max per window) is
/// fitted. Throws NonMonotoneErrors if the grid differences do not shrink.
ShiftDecay shift_decay(const FluxModel& flux, const Profile& u0, const PeriodicSignal& ub,
                       const ShockData& shock, const InviscidConfig& cfg, double x_inf,
                       double t_from, double t_to, double window = 5.0);

struct StructureReport {
  std::vector<double> times;
  std::vector<double> left_gap;        // sup |u - u_minus| for x < X - margin
  std::vector<double> right_gap;       // sup |u - u_plus_wave| for x > X + margin
  std::vector<double> right_gap_mean;  // mean |u - u_plus_wave| over the same cells
  double left_decay_exponent = 0.0;    // slope of log left_gap vs log t
  double right_decay_exponent = 0.0;
  bool left_fit_valid = false;
  bool right_fit_valid = false;
};

/// Compares the solution against u_minus left of the shock and against the inviscid boundary
/// wave right of it. At most `probe_cells` cells per side are sampled.
StructureReport verify_structure(const GridSolution& sol, const ShockTrajectory& traj,
                                 const ShockData& shock, const InviscidWaveField& wave,
                                 double t_from, double t_to, double margin,
                                 std::size_t probe_cells = 256);

struct CurveSet {
  std::vector<double> times;
  std::vector<double> x1, x2;          // extreme forward characteristics from the origin
  std::vector<double> gamma1, gamma2;  // divides
  std::vector<double> x1_star, x2_star;
  double x0 = 0.0;
  double t_b = 0.0;
  double coincidence_time = 0.0;
};

/// Builds X1, X2, Gamma1, Gamma2 from the run and returns the first snapshot time after which
/// X2* - X1* stays below 2 dx. Throws NotCoincided otherwise.
CurveSet coincidence_time(const FluxModel& flux, const GridSolution& sol, const Profile& u0,
                          const PeriodicSignal& ub, const ShockData& shock);

}  // namespace tpshock
