#pragma once

#include <cstddef>
#include <vector>

namespace tpshock {

/// Space-time record of a run on the truncated half-line [x_left, 0].
///
/// `x` holds cell centres for the finite-volume Godunov solver and node positions for the
/// viscous solver. Traces are recorded once per time step; `step_times[n]` is the time at the
/// end of step n, and `mass[n]` the discrete mass after it (mass[0] belongs to t = 0).
struct GridSolution {
  double x_left = 0.0;
  double dx = 0.0;
  std::vector<double> x;

  std::vector<double> times;
  std::vector<std::vector<double>> states;

  std::vector<double> step_times;
  std::vector<double> step_dt;
  std::vector<double> boundary_trace;  // u(0-, t)
  std::vector<double> flux_trace;      // time-averaged numerical flux through x = 0 over the step
  std::vector<double> left_flux_trace; // same through x = x_left
  std::vector<double> mass;

  std::size_t cells() const { return x.size(); }
  /// Largest |mass change - dt (F_left - F_right)| over all steps.
  double max_conservation_defect() const;
};

}  // namespace tpshock
