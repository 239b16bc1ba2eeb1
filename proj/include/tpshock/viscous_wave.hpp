#pragma once

#include <vector>

#include "tpshock/flux.hpp"
#include "tpshock/signal.hpp"

namespace tpshock {

/// Roots of r^2 - r1 r - i w_k = 0, r1 = f'(mean), w_k = 2 pi k / T.
struct EigenPair {
  int k = 0;
  cplx r_plus, r_minus;
  double residual = 0.0;  // max |r^2 - r1 r - i w_k| over both roots
};

/// Throws NonIncomingMean if f'(ub_mean) >= 0.
EigenPair eigenvalues(const FluxModel& flux, double ub_mean, double period, int k);

/// 0.5 * Re r_plus(1).
double theta_b(const FluxModel& flux, double ub_mean, double period);

struct ViscousWaveOptions {
  double x_min = 0.0;        // 0: -40 / |f'(ub_mean)|
  std::size_t nodes = 2048;  // x grid on [x_min, 0]
  int modes = 64;            // K
  std::size_t time_samples = 256;
  double tol = 1e-10;
  int max_sweeps = 60;
  double amplitude_limit = 0.1;  // sup |u_b - mean| accepted by the fixed-point solver
};

/// Time-periodic solution of u_t + f(u)_x = u_xx on x < 0, u(0, t) = u_b(t), in Fourier form:
/// v = u - mean(u_b) = sum_k v_k(x) e^{i 2 pi k t / T}. Mode 0 is stored as the deviation from its
/// far-field value v0_inf so that weighted norms stay free of cancellation.
class SpectralWave {
 public:
  const std::vector<double>& x() const { return x_; }
  double dx() const { return h_; }
  int modes() const { return K_; }
  double period() const { return period_; }
  double ub_mean() const { return ub_mean_; }
  double r1() const { return r1_; }
  double theta_b() const { return theta_b_; }
  double v0_inf() const { return v0_inf_; }
  double u_bar_plus() const { return ub_mean_ + v0_inf_; }

  /// v_k(x_j) for 0 <= k <= K; k = 0 returns the full value including v0_inf.
  cplx coefficient(std::size_t j, int k) const;
  cplx derivative_coefficient(std::size_t j, int k) const { return d_[j][std::size_t(k)]; }
  /// v_0(x_j) - v0_inf.
  cplx mean_deviation(std::size_t j) const { return v_[j][0]; }

  /// u+(x_j, t) and its x-derivative.
  double value(std::size_t j, double t) const;
  double dx_value(std::size_t j, double t) const;

  const std::vector<double>& residual_history() const { return history_; }
  /// Geometric mean of successive residual ratios over the sweeps above the noise floor.
  double contraction_ratio() const { return ratio_; }
  int sweeps() const { return int(history_.size()); }

  /// Share of the squared coefficient mass in mode K, summed over the grid.
  double top_mode_share() const;

 private:
  friend class WaveBuilder;
  friend double wave_distance(const SpectralWave&, const SpectralWave&);

  std::vector<double> x_;
  double h_ = 0.0;
  int K_ = 0;
  double period_ = 1.0, ub_mean_ = 0.0, r1_ = 0.0, theta_b_ = 0.0;
  double v0_inf_ = 0.0;
  std::vector<std::vector<cplx>> v_, d_;  // [node][k], k = 0..K
  std::vector<double> history_;
  double ratio_ = 0.0;
};

/// v_k = e^{r_plus x} v_b,k, v0_inf = 0.
SpectralWave linear_wave(const FluxModel& flux, const PeriodicSignal& ub,
                         const ViscousWaveOptions& opt = {});

/// One application of the fixed-point map. Throws TruncationOverflow if the top mode carries more
/// than 1e-8 of the coefficient mass.
SpectralWave apply_xi(const FluxModel& flux, const SpectralWave& current, const PeriodicSignal& ub,
                      const ViscousWaveOptions& opt = {});

/// sup_x e^{-theta_b x} (||dv - dv0_inf||_{H^1_t} + ||d_x dv||_{L^2_t}) + |dv0_inf|, with the
/// per-period normalised Parseval norms.
double wave_distance(const SpectralWave& a, const SpectralWave& b);

/// Iterates v <- Xi(v) from the linear solution until the distance between sweeps is below tol.
/// Throws NotContracting when the residual ratio stays >= 0.9 for 3 sweeps or max_sweeps is hit,
/// InvalidArgument when the boundary amplitude exceeds opt.amplitude_limit.
SpectralWave solve_periodic_wave(const FluxModel& flux, const PeriodicSignal& ub,
                                 const ViscousWaveOptions& opt = {});

struct WaveDecayFit {
  bool degenerate = false;
  double fitted_rate = 0.0;     // slope of 0.5 log(sum_{k != 0} |v_k|^2) against x
  double dominant_rate = 0.0;   // slope of log |v_1|
  double theta_b = 0.0;
  double predicted_mode1 = 0.0;  // Re r_plus(1)
  double r_squared = 0.0;
};

/// Fits over the part of the grid where the oscillation is above the noise floor.
WaveDecayFit decay_check(const SpectralWave& wave);

struct CollocationReport {
  double max_residual = 0.0;  // |v_xx - r1 v_x - v_t - f1(v) v_x|, physical space, interior nodes
  double max_bound = 0.0;     // finite-difference truncation plus mode-K truncation estimate
};

/// Substitutes the wave into the PDE with v_xx from a fourth-order difference of v_x.
CollocationReport collocation_residual(const FluxModel& flux, const SpectralWave& wave);

/// Evaluates a converged wave at fixed solver nodes for arbitrary times. Coefficients are
/// interpolated (linearly in x) once; modes below 1e-15 at a node are dropped, and nodes left
/// of the spectral grid carry u_bar_plus.
class WaveSampler {
 public:
  WaveSampler(const SpectralWave& wave, const std::vector<double>& nodes);
  double u_bar_plus() const { return u_bar_plus_; }
  std::size_t size() const { return mean_.size(); }
  /// u+(node_i, t) and d_x u+(node_i, t).
  void evaluate(double t, std::vector<double>& u, std::vector<double>& ux) const;
  double value(std::size_t i, double t) const;
  double dx_value(std::size_t i, double t) const;

 private:
  double omega_ = 0.0;
  double u_bar_plus_ = 0.0;
  std::vector<double> mean_, mean_dx_;
  std::vector<std::vector<int>> ks_;
  std::vector<std::vector<cplx>> c_, cd_;
};

}  // namespace tpshock
