#include "tpshock/viscous_wave.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "tpshock/error.hpp"
#include "tpshock/numerics.hpp"

namespace tpshock {

namespace {

double omega(double period, int k) { return 2.0 * std::numbers::pi * double(k) / period; }

// phi1(z) = int_0^1 e^{zs} ds, psi(z) = int_0^1 s e^{zs} ds.
cplx phi1(cplx z) {
  if (std::abs(z) < 0.5) {
    cplx term = 1.0, sum = 0.0;
    for (int n = 0; n < 20; ++n) {
      sum += term / double(n + 1);
      term *= z / double(n + 1);
    }
    return sum;
  }
  return (std::exp(z) - 1.0) / z;
}

cplx psi(cplx z) {
  if (std::abs(z) < 0.5) {
    cplx term = 1.0, sum = 0.0;  // term = z^n / n!
    for (int n = 0; n < 20; ++n) {
      sum += term / double(n + 2);
      term *= z / double(n + 1);
    }
    return sum;
  }
  return (std::exp(z) * (z - 1.0) + 1.0) / (z * z);
}

// Product-integration weights for int over one cell of e^{r (distance from the far end)} times a
// linear interpolant: the near node gets w_near, the far node w_far.
struct Weights {
  cplx decay, w_near, w_far;
};

Weights weights(cplx r_times_h_signed, double h) {
  const cplx z = r_times_h_signed;
  const cplx p1 = phi1(z), ps = psi(z);
  return {std::exp(z), h * (p1 - ps), h * ps};
}

}  // namespace

EigenPair eigenvalues(const FluxModel& flux, double ub_mean, double period, int k) {
  const double r1 = flux.d1(ub_mean);
  if (!(r1 < 0.0)) {
    std::ostringstream os;
    os << "f'(mean u_b) = " << r1 << " >= 0";
    throw Error(ErrorKind::NonIncomingMean, os.str());
  }
  const double r2 = omega(period, k);
  EigenPair e;
  e.k = k;
  if (k == 0) {
    e.r_plus = 0.0;
    e.r_minus = r1;
  } else {
    const double big = std::sqrt(r1 * r1 * r1 * r1 + 16.0 * r2 * r2);
    const double re = std::sqrt(big + r1 * r1), im = std::sqrt(big - r1 * r1);
    const double sg = k > 0 ? 1.0 : -1.0;
    const cplx root = cplx(re, sg * im) / std::sqrt(2.0);
    e.r_plus = 0.5 * (r1 + root);
    e.r_minus = 0.5 * (r1 - root);
  }
  const cplx iw(0.0, r2);
  e.residual = std::max(std::abs(e.r_plus * e.r_plus - r1 * e.r_plus - iw),
                        std::abs(e.r_minus * e.r_minus - r1 * e.r_minus - iw));
  return e;
}

double theta_b(const FluxModel& flux, double ub_mean, double period) {
  return 0.5 * eigenvalues(flux, ub_mean, period, 1).r_plus.real();
}

class WaveBuilder {
 public:
  static SpectralWave empty(const FluxModel& flux, const PeriodicSignal& ub,
                            const ViscousWaveOptions& opt) {
    SpectralWave w;
    w.period_ = ub.period();
    w.ub_mean_ = ub.mean();
    w.r1_ = flux.d1(w.ub_mean_);
    w.theta_b_ = theta_b(flux, w.ub_mean_, w.period_);
    w.K_ = opt.modes;
    if (opt.modes < 1 || opt.nodes < 8 || opt.time_samples < std::size_t(2 * opt.modes + 2))
      throw Error(ErrorKind::InvalidArgument, "need K >= 1, >= 8 nodes and N_t >= 2K + 2");
    const double xmin = opt.x_min < 0.0 ? opt.x_min : -40.0 / std::abs(w.r1_);
    w.h_ = -xmin / double(opt.nodes - 1);
    w.x_.resize(opt.nodes);
    for (std::size_t j = 0; j < opt.nodes; ++j) w.x_[j] = xmin + w.h_ * double(j);
    w.x_.back() = 0.0;
    w.v_.assign(opt.nodes, std::vector<cplx>(std::size_t(opt.modes) + 1, 0.0));
    w.d_ = w.v_;
    return w;
  }

  static void set_linear(SpectralWave& w, const FluxModel& flux, const PeriodicSignal& ub) {
    for (int k = 1; k <= w.K_; ++k) {
      const cplx vb = ub.coefficient(k);
      const cplx rp = eigenvalues(flux, w.ub_mean_, w.period_, k).r_plus;
      for (std::size_t j = 0; j < w.x_.size(); ++j) {
        w.v_[j][std::size_t(k)] = std::exp(rp * w.x_[j]) * vb;
        w.d_[j][std::size_t(k)] = rp * w.v_[j][std::size_t(k)];
      }
    }
  }

  // Fourier coefficients (k = 0..K) of f1(v) v_x at every node.
  static std::vector<std::vector<cplx>> nonlinear(const FluxModel& flux, const SpectralWave& w,
                                                  std::size_t nt) {
    RealFft fft(nt);
    const std::size_t K = std::size_t(w.K_);
    std::vector<std::vector<cplx>> out(w.x_.size(), std::vector<cplx>(K + 1));
    std::vector<cplx> cv(K + 1), cd(K + 1), spec;
    std::vector<double> sv, sd, prod(nt);
    const double fb = flux.d1(w.ub_mean_);
    for (std::size_t j = 0; j < w.x_.size(); ++j) {
      for (std::size_t k = 0; k <= K; ++k) {
        cv[k] = w.v_[j][k];
        cd[k] = w.d_[j][k];
      }
      cv[0] = cplx(cv[0].real() + w.v0_inf_, 0.0);
      cd[0] = cplx(cd[0].real(), 0.0);
      fft.inverse(cv, sv);
      fft.inverse(cd, sd);
      for (std::size_t i = 0; i < nt; ++i) prod[i] = (flux.d1(w.ub_mean_ + sv[i]) - fb) * sd[i];
      fft.forward(prod, spec);
      for (std::size_t k = 0; k <= K; ++k) out[j][k] = spec[k];
      out[j][0] = cplx(out[j][0].real(), 0.0);
    }
    return out;
  }

  static SpectralWave apply(const FluxModel& flux, const SpectralWave& cur,
                            const PeriodicSignal& ub, const ViscousWaveOptions& opt) {
    SpectralWave w = cur;
    w.history_.clear();
    const auto N = nonlinear(flux, cur, opt.time_samples);
    const std::size_t n = w.x_.size();
    const double h = w.h_;
    std::vector<cplx> A(n), B(n);
    for (int k = 1; k <= w.K_; ++k) {
      const std::size_t kk = std::size_t(k);
      const auto e = eigenvalues(flux, w.ub_mean_, w.period_, k);
      const cplx rp = e.r_plus, rm = e.r_minus;
      // A(x_j) = int_{x_j}^0 e^{r+ (x_j - y)} N dy, swept from the boundary.
      const Weights wa = weights(-rp * h, h);
      A[n - 1] = 0.0;
      for (std::size_t j = n - 1; j-- > 0;)
        A[j] = wa.decay * A[j + 1] + wa.w_near * N[j][kk] + wa.w_far * N[j + 1][kk];
      // B(x_j) = int_{x_min}^{x_j} e^{r- (x_j - y)} N dy, swept from the far end.
      const Weights wb = weights(rm * h, h);
      B[0] = 0.0;
      for (std::size_t j = 1; j < n; ++j)
        B[j] = wb.decay * B[j - 1] + wb.w_near * N[j][kk] + wb.w_far * N[j - 1][kk];
      const cplx den = rm - rp;
      const cplx g = ub.coefficient(k) - B[n - 1] / den;
      for (std::size_t j = 0; j < n; ++j) {
        const cplx e_plus = std::exp(rp * w.x_[j]);
        w.v_[j][kk] = e_plus * g + (A[j] + B[j]) / den;
        w.d_[j][kk] = rp * e_plus * g + (rp * A[j] + rm * B[j]) / den;
      }
      w.v_[n - 1][kk] = ub.coefficient(k);
    }
    // Mode 0: w0' = B0 = int e^{r1 (x - y)} N0, w0 - w0_inf = (B0 - C) / r1, C = int_{x_min}^x N0.
    {
      const double r1 = w.r1_;
      const Weights wb = weights(cplx(r1 * h, 0.0), h);
      std::vector<double> B0(n, 0.0), C(n, 0.0);
      for (std::size_t j = 1; j < n; ++j) {
        B0[j] = (wb.decay * B0[j - 1] + wb.w_near * N[j][0].real() + wb.w_far * N[j - 1][0].real())
                    .real();
        C[j] = C[j - 1] + 0.5 * h * (N[j][0].real() + N[j - 1][0].real());
      }
      for (std::size_t j = 0; j < n; ++j) {
        w.v_[j][0] = (B0[j] - C[j]) / r1;
        w.d_[j][0] = B0[j];
      }
      w.v0_inf_ = -(B0[n - 1] - C[n - 1]) / r1;
    }
    return w;
  }

  static void set_history(SpectralWave& w, std::vector<double> hist) {
    w.history_ = std::move(hist);
    // Geometric mean of successive ratios while the residual is above the round-off floor.
    const double floor = hist_floor(w.history_);
    double logsum = 0.0;
    int count = 0;
    for (std::size_t i = 1; i < w.history_.size(); ++i) {
      if (w.history_[i] <= floor || w.history_[i - 1] <= floor) break;
      logsum += std::log(w.history_[i] / w.history_[i - 1]);
      ++count;
    }
    w.ratio_ = count > 0 ? std::exp(logsum / count) : 0.0;
  }

  static double hist_floor(const std::vector<double>& h) {
    return h.empty() ? 0.0 : 1e-11 * std::max(h.front(), 1e-300);
  }
};

cplx SpectralWave::coefficient(std::size_t j, int k) const {
  if (k == 0) return v_[j][0] + v0_inf_;
  return v_[j][std::size_t(k)];
}

double SpectralWave::value(std::size_t j, double t) const {
  const double w = 2.0 * std::numbers::pi / period_;
  double u = ub_mean_ + v0_inf_ + v_[j][0].real();
  for (int k = 1; k <= K_; ++k) u += 2.0 * (v_[j][std::size_t(k)] * std::polar(1.0, w * k * t)).real();
  return u;
}

double SpectralWave::dx_value(std::size_t j, double t) const {
  const double w = 2.0 * std::numbers::pi / period_;
  double u = d_[j][0].real();
  for (int k = 1; k <= K_; ++k) u += 2.0 * (d_[j][std::size_t(k)] * std::polar(1.0, w * k * t)).real();
  return u;
}

double SpectralWave::top_mode_share() const {
  double top = 0.0, total = 0.0;
  for (const auto& row : v_) {
    for (int k = 1; k <= K_; ++k) total += std::norm(row[std::size_t(k)]);
    top += std::norm(row[std::size_t(K_)]);
  }
  return total > 0.0 ? top / total : 0.0;
}

SpectralWave linear_wave(const FluxModel& flux, const PeriodicSignal& ub,
                         const ViscousWaveOptions& opt) {
  SpectralWave w = WaveBuilder::empty(flux, ub, opt);
  WaveBuilder::set_linear(w, flux, ub);
  return w;
}

SpectralWave apply_xi(const FluxModel& flux, const SpectralWave& current, const PeriodicSignal& ub,
                      const ViscousWaveOptions& opt) {
  SpectralWave w = WaveBuilder::apply(flux, current, ub, opt);
  const double share = w.top_mode_share();
  if (share > 1e-8) {
    std::ostringstream os;
    os << "mode K carries " << share << " of the coefficient mass";
    throw Error(ErrorKind::TruncationOverflow, os.str());
  }
  return w;
}

double wave_distance(const SpectralWave& a, const SpectralWave& b) {
  double worst = 0.0;
  for (std::size_t j = 0; j < a.x_.size(); ++j) {
    double h1 = std::norm(a.v_[j][0] - b.v_[j][0]);
    double l2x = std::norm(a.d_[j][0] - b.d_[j][0]);
    for (int k = 1; k <= a.K_; ++k) {
      const std::size_t kk = std::size_t(k);
      const double w = omega(a.period_, k);
      h1 += 2.0 * (1.0 + w * w) * std::norm(a.v_[j][kk] - b.v_[j][kk]);
      l2x += 2.0 * std::norm(a.d_[j][kk] - b.d_[j][kk]);
    }
    const double weight = std::exp(-a.theta_b_ * a.x_[j]);
    worst = std::max(worst, weight * (std::sqrt(h1) + std::sqrt(l2x)));
  }
  return worst + std::abs(a.v0_inf_ - b.v0_inf_);
}

SpectralWave solve_periodic_wave(const FluxModel& flux, const PeriodicSignal& ub,
                                 const ViscousWaveOptions& opt) {
  const double amp = std::max(ub.max_sample() - ub.mean(), ub.mean() - ub.min_sample());
  if (amp > opt.amplitude_limit) {
    std::ostringstream os;
    os << "boundary amplitude " << amp << " exceeds the fixed-point limit " << opt.amplitude_limit;
    throw Error(ErrorKind::InvalidArgument, os.str());
  }
  SpectralWave cur = linear_wave(flux, ub, opt);
  std::vector<double> hist;
  int stalled = 0;
  for (int sweep = 0; sweep < opt.max_sweeps; ++sweep) {
    SpectralWave next = apply_xi(flux, cur, ub, opt);
    const double r = wave_distance(next, cur);
    hist.push_back(r);
    cur = std::move(next);
    if (r < opt.tol) {
      WaveBuilder::set_history(cur, hist);
      return cur;
    }
    if (hist.size() >= 2 && r >= 0.9 * hist[hist.size() - 2])
      ++stalled;
    else
      stalled = 0;
    if (stalled >= 3)
      throw Error(ErrorKind::NotContracting, "residual ratio >= 0.9 for 3 consecutive sweeps");
  }
  std::ostringstream os;
  os << "no convergence in " << opt.max_sweeps << " sweeps, last residual " << hist.back();
  throw Error(ErrorKind::NotContracting, os.str());
}

WaveDecayFit decay_check(const SpectralWave& wave) {
  WaveDecayFit fit;
  fit.theta_b = wave.theta_b();
  const std::size_t n = wave.x().size();
  std::vector<double> energy(n), mode1(n);
  for (std::size_t j = 0; j < n; ++j) {
    double e = 0.0;
    for (int k = 1; k <= wave.modes(); ++k) e += 2.0 * std::norm(wave.coefficient(j, k));
    energy[j] = e;
    mode1[j] = std::abs(wave.coefficient(j, 1));
  }
  // Re r_plus(1) from the stored r1 and period.
  {
    const double r1 = wave.r1(), r2 = omega(wave.period(), 1);
    const double big = std::sqrt(r1 * r1 * r1 * r1 + 16.0 * r2 * r2);
    fit.predicted_mode1 = 0.5 * (r1 + std::sqrt(big + r1 * r1) / std::sqrt(2.0));
  }
  const double e0 = energy[n - 1];
  if (e0 < 1e-28) {
    fit.degenerate = true;
    return fit;
  }
  std::vector<double> xs, ys, x1, y1;
  for (std::size_t j = 0; j < n; ++j) {
    if (energy[j] > 1e-24 * e0) {
      xs.push_back(wave.x()[j]);
      ys.push_back(0.5 * std::log(energy[j]));
    }
    if (mode1[j] > 1e-12 * mode1[n - 1] && mode1[n - 1] > 0.0) {
      x1.push_back(wave.x()[j]);
      y1.push_back(std::log(mode1[j]));
    }
  }
  if (xs.size() < 5) {
    fit.degenerate = true;
    return fit;
  }
  const RateFit f = fit_line(xs, ys);
  fit.fitted_rate = f.slope;
  fit.r_squared = f.r_squared;
  if (x1.size() >= 5) fit.dominant_rate = fit_line(x1, y1).slope;
  return fit;
}

CollocationReport collocation_residual(const FluxModel& flux, const SpectralWave& wave) {
  CollocationReport rep;
  const auto N = WaveBuilder::nonlinear(flux, wave, std::size_t(4 * wave.modes() + 4));
  const std::size_t n = wave.x().size();
  const double h = wave.dx(), r1 = wave.r1();
  for (std::size_t j = 1; j + 1 < n; ++j) {
    double res = 0.0, bound = 0.0;
    for (int k = 0; k <= wave.modes(); ++k) {
      const double mult = k == 0 ? 1.0 : 2.0;
      const double w = omega(wave.period(), k);
      const cplx iw(0.0, w);
      const cplx v = k == 0 ? wave.mean_deviation(j) : wave.coefficient(j, k);
      const cplx d = wave.derivative_coefficient(j, k);
      const cplx dxx =
          (wave.derivative_coefficient(j + 1, k) - wave.derivative_coefficient(j - 1, k)) / (2 * h);
      const std::size_t kk = std::size_t(k);
      res += mult * std::abs(dxx - r1 * d - iw * v - N[j][kk]);
      const auto e = eigenvalues(flux, wave.ub_mean(), wave.period(), k == 0 ? 0 : k);
      const double rho = std::max(std::abs(e.r_plus), std::abs(e.r_minus));
      bound += mult * (h * h / 6.0 * rho * rho * (std::abs(r1) * std::abs(d) + w * std::abs(v)) +
                       0.25 * std::abs(N[j + 1][kk] - 2.0 * N[j][kk] + N[j - 1][kk]) +
                       4e-16 * (std::abs(d) + std::abs(wave.derivative_coefficient(j + 1, k))) / h);
    }
    const std::size_t K = std::size_t(wave.modes());
    bound += 2.0 * omega(wave.period(), int(K)) * std::abs(wave.coefficient(j, int(K))) +
             2.0 * std::abs(N[j][K]);
    rep.max_residual = std::max(rep.max_residual, res);
    rep.max_bound = std::max(rep.max_bound, bound);
  }
  return rep;
}

WaveSampler::WaveSampler(const SpectralWave& wave, const std::vector<double>& nodes)
    : omega_(2.0 * std::numbers::pi / wave.period()), u_bar_plus_(wave.u_bar_plus()) {
  const auto& xs = wave.x();
  const double h = wave.dx();
  const std::size_t m = nodes.size();
  mean_.assign(m, u_bar_plus_);
  mean_dx_.assign(m, 0.0);
  ks_.assign(m, {});
  c_.assign(m, {});
  cd_.assign(m, {});
  for (std::size_t i = 0; i < m; ++i) {
    const double x = nodes[i];
    if (x < xs.front() || x > 0.0) continue;
    std::size_t j = std::min<std::size_t>(std::size_t((x - xs.front()) / h), xs.size() - 2);
    const double s = (x - xs[j]) / h;
    // Linear weights on both the value and the derivative coefficients; exact at grid nodes.
    auto lerp = [&](cplx a, cplx b) { return (1.0 - s) * a + s * b; };
    mean_[i] = u_bar_plus_ + lerp(wave.mean_deviation(j), wave.mean_deviation(j + 1)).real();
    mean_dx_[i] =
        lerp(wave.derivative_coefficient(j, 0), wave.derivative_coefficient(j + 1, 0)).real();
    for (int k = 1; k <= wave.modes(); ++k) {
      const cplx c = lerp(wave.coefficient(j, k), wave.coefficient(j + 1, k));
      const cplx cd = lerp(wave.derivative_coefficient(j, k), wave.derivative_coefficient(j + 1, k));
      if (std::abs(c) < 1e-15 && std::abs(cd) < 1e-15) continue;
      ks_[i].push_back(k);
      c_[i].push_back(c);
      cd_[i].push_back(cd);
    }
  }
}

double WaveSampler::value(std::size_t i, double t) const {
  double u = mean_[i];
  for (std::size_t q = 0; q < ks_[i].size(); ++q)
    u += 2.0 * (c_[i][q] * std::polar(1.0, omega_ * ks_[i][q] * t)).real();
  return u;
}

double WaveSampler::dx_value(std::size_t i, double t) const {
  double u = mean_dx_[i];
  for (std::size_t q = 0; q < ks_[i].size(); ++q)
    u += 2.0 * (cd_[i][q] * std::polar(1.0, omega_ * ks_[i][q] * t)).real();
  return u;
}

void WaveSampler::evaluate(double t, std::vector<double>& u, std::vector<double>& ux) const {
  const std::size_t m = mean_.size();
  u.resize(m);
  ux.resize(m);
  int kmax = 0;
  for (const auto& ks : ks_)
    if (!ks.empty()) kmax = std::max(kmax, ks.back());
  std::vector<cplx> powers(std::size_t(kmax) + 1);
  const cplx z = std::polar(1.0, omega_ * t);
  powers[0] = 1.0;
  for (int k = 1; k <= kmax; ++k) powers[std::size_t(k)] = powers[std::size_t(k) - 1] * z;
  for (std::size_t i = 0; i < m; ++i) {
    double a = mean_[i], b = mean_dx_[i];
    for (std::size_t q = 0; q < ks_[i].size(); ++q) {
      const cplx p = powers[std::size_t(ks_[i][q])];
      a += 2.0 * (c_[i][q] * p).real();
      b += 2.0 * (cd_[i][q] * p).real();
    }
    u[i] = a;
    ux[i] = b;
  }
}

}  // namespace tpshock
