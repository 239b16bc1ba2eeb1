#pragma once

#include <complex>
#include <functional>
#include <span>
#include <vector>

namespace tpshock {

using cplx = std::complex<double>;

/// Forward DFT of real samples on one period: c_k = (1/N) sum_j x_j e^{-2 pi i k j / N},
/// returned for k = 0..N/2.
std::vector<cplx> real_fourier(std::span<const double> samples);
/// Inverse of real_fourier for a signal with N samples (coefficients for k = 0..N/2, the rest
/// implied by conjugate symmetry). Missing high modes are treated as zero.
std::vector<double> real_synthesis(std::span<const cplx> coeffs, std::size_t n);

/// Reusable FFTW plans for repeated transforms of one length; same normalisation as
/// real_fourier / real_synthesis. Not shareable between threads.
class RealFft {
 public:
  explicit RealFft(std::size_t n);
  ~RealFft();
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  std::size_t size() const { return n_; }
  /// Writes coefficients k = 0..n/2.
  void forward(std::span<const double> samples, std::vector<cplx>& coeffs);
  /// Reads up to n/2 + 1 coefficients (missing ones are zero).
  void inverse(std::span<const cplx> coeffs, std::vector<double>& samples);

 private:
  std::size_t n_;
  std::vector<double> real_;
  std::vector<cplx> spec_;
  void* r2c_;
  void* c2r_;
};

/// Boundary datum u_b over one period: uniform samples plus the Fourier series
/// u_b(t) = sum_k c_k e^{i 2 pi k t / T}.
class PeriodicSignal {
 public:
  static PeriodicSignal from_function(double period, const std::function<double(double)>& fn,
                                      std::size_t samples = 1024, std::size_t modes = 128);
  static PeriodicSignal from_samples(double period, std::vector<double> samples,
                                     std::size_t modes = 128);
  static PeriodicSignal constant(double value, double period = 1.0, std::size_t samples = 1024);
  static PeriodicSignal sinusoid(double mean, double amplitude, double period,
                                 std::size_t samples = 1024, std::size_t modes = 128);

  double period() const { return period_; }
  double mean() const { return coeffs_.front().real(); }
  std::size_t mode_count() const { return coeffs_.size() - 1; }
  /// c_k for 0 <= k <= K; negative modes are conjugates.
  cplx coefficient(int k) const;
  const std::vector<double>& samples() const { return samples_; }
  double sample_time(std::size_t j) const { return period_ * double(j) / double(samples_.size()); }

  /// Trigonometric interpolation through the retained modes (exact for band-limited data).
  double operator()(double t) const;
  double derivative(double t) const;

  double min_sample() const;
  double max_sample() const;
  /// Same signal delayed by tau: result(t) = this(t - tau).
  PeriodicSignal shifted(double tau) const;
  /// sqrt(sum (1 + w_k^2)^m |c_k|^2) over k != 0.
  double hm_norm_of_oscillation(int m) const;

 private:
  PeriodicSignal(double period, std::vector<double> samples, std::size_t modes);

  double period_;
  std::vector<double> samples_;
  std::vector<cplx> coeffs_;
  std::vector<int> active_;  // modes with non-negligible coefficients (k >= 1)
};

}  // namespace tpshock
