#include "tpshock/signal.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>

#include "tpshock/error.hpp"

namespace tpshock {

namespace {

// FFTW planning is not thread-safe; execution with new-array functions is.
std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

std::vector<cplx> real_fourier(std::span<const double> samples) {
  const int n = static_cast<int>(samples.size());
  std::vector<double> in(samples.begin(), samples.end());
  std::vector<cplx> out(n / 2 + 1);
  fftw_plan plan;
  {
    std::lock_guard lock(plan_mutex());
    plan = fftw_plan_dft_r2c_1d(n, in.data(), reinterpret_cast<fftw_complex*>(out.data()),
                                FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard lock(plan_mutex());
    fftw_destroy_plan(plan);
  }
  for (auto& c : out) c /= double(n);
  return out;
}

std::vector<double> real_synthesis(std::span<const cplx> coeffs, std::size_t n) {
  std::vector<cplx> in(n / 2 + 1, cplx{0.0, 0.0});
  std::copy_n(coeffs.begin(), std::min(coeffs.size(), in.size()), in.begin());
  if (n % 2 == 0) in.back() = cplx{in.back().real(), 0.0};
  std::vector<double> out(n);
  fftw_plan plan;
  {
    std::lock_guard lock(plan_mutex());
    plan = fftw_plan_dft_c2r_1d(static_cast<int>(n), reinterpret_cast<fftw_complex*>(in.data()),
                                out.data(), FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard lock(plan_mutex());
    fftw_destroy_plan(plan);
  }
  return out;
}

RealFft::RealFft(std::size_t n) : n_(n), real_(n), spec_(n / 2 + 1) {
  std::lock_guard lock(plan_mutex());
  auto* spec = reinterpret_cast<fftw_complex*>(spec_.data());
  r2c_ = fftw_plan_dft_r2c_1d(int(n), real_.data(), spec, FFTW_ESTIMATE);
  c2r_ = fftw_plan_dft_c2r_1d(int(n), spec, real_.data(), FFTW_ESTIMATE);
}

RealFft::~RealFft() {
  std::lock_guard lock(plan_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(r2c_));
  fftw_destroy_plan(static_cast<fftw_plan>(c2r_));
}

void RealFft::forward(std::span<const double> samples, std::vector<cplx>& coeffs) {
  std::copy(samples.begin(), samples.end(), real_.begin());
  fftw_execute(static_cast<fftw_plan>(r2c_));
  coeffs.resize(spec_.size());
  const double inv = 1.0 / double(n_);
  for (std::size_t k = 0; k < spec_.size(); ++k) coeffs[k] = spec_[k] * inv;
}

void RealFft::inverse(std::span<const cplx> coeffs, std::vector<double>& samples) {
  std::fill(spec_.begin(), spec_.end(), cplx{0.0, 0.0});
  std::copy_n(coeffs.begin(), std::min(coeffs.size(), spec_.size()), spec_.begin());
  if (n_ % 2 == 0) spec_.back() = cplx{spec_.back().real(), 0.0};
  fftw_execute(static_cast<fftw_plan>(c2r_));
  samples.assign(real_.begin(), real_.end());
}

PeriodicSignal::PeriodicSignal(double period, std::vector<double> samples, std::size_t modes)
    : period_(period), samples_(std::move(samples)) {
  if (!(period_ > 0.0)) throw Error(ErrorKind::InvalidArgument, "period must be positive");
  if (samples_.size() < 4) throw Error(ErrorKind::InvalidArgument, "need at least 4 samples");
  auto c = real_fourier(samples_);
  const std::size_t keep = std::min(modes, c.size() - 1);
  coeffs_.assign(c.begin(), c.begin() + keep + 1);
  // The Nyquist coefficient of an even-length DFT is shared by +/-N/2.
  if (samples_.size() % 2 == 0 && keep == samples_.size() / 2) coeffs_.back() *= 0.5;
  double scale = 0.0;
  for (double s : samples_) scale = std::max(scale, std::abs(s));
  for (std::size_t k = 1; k < coeffs_.size(); ++k)
    if (std::abs(coeffs_[k]) > 1e-15 * std::max(scale, 1.0)) active_.push_back(int(k));
}

PeriodicSignal PeriodicSignal::from_function(double period,
                                             const std::function<double(double)>& fn,
                                             std::size_t samples, std::size_t modes) {
  std::vector<double> s(samples);
  for (std::size_t j = 0; j < samples; ++j) s[j] = fn(period * double(j) / double(samples));
  return PeriodicSignal(period, std::move(s), modes);
}

PeriodicSignal PeriodicSignal::from_samples(double period, std::vector<double> samples,
                                            std::size_t modes) {
  return PeriodicSignal(period, std::move(samples), modes);
}

PeriodicSignal PeriodicSignal::constant(double value, double period, std::size_t samples) {
  return PeriodicSignal(period, std::vector<double>(samples, value), 1);
}

PeriodicSignal PeriodicSignal::sinusoid(double mean, double amplitude, double period,
                                        std::size_t samples, std::size_t modes) {
  const double w = 2.0 * std::numbers::pi / period;
  return from_function(
      period, [=](double t) { return mean + amplitude * std::sin(w * t); }, samples, modes);
}

cplx PeriodicSignal::coefficient(int k) const {
  const std::size_t ak = static_cast<std::size_t>(std::abs(k));
  if (ak >= coeffs_.size()) return {0.0, 0.0};
  return k >= 0 ? coeffs_[ak] : std::conj(coeffs_[ak]);
}

double PeriodicSignal::operator()(double t) const {
  const double w = 2.0 * std::numbers::pi / period_;
  double v = coeffs_[0].real();
  for (int k : active_) v += 2.0 * (coeffs_[k] * std::polar(1.0, w * k * t)).real();
  return v;
}

double PeriodicSignal::derivative(double t) const {
  const double w = 2.0 * std::numbers::pi / period_;
  double v = 0.0;
  for (int k : active_)
    v += 2.0 * (cplx(0.0, w * k) * coeffs_[k] * std::polar(1.0, w * k * t)).real();
  return v;
}

double PeriodicSignal::min_sample() const {
  return *std::min_element(samples_.begin(), samples_.end());
}

double PeriodicSignal::max_sample() const {
  return *std::max_element(samples_.begin(), samples_.end());
}

PeriodicSignal PeriodicSignal::shifted(double tau) const {
  return from_function(
      period_, [&](double t) { return (*this)(t - tau); }, samples_.size(), coeffs_.size() - 1);
}

double PeriodicSignal::hm_norm_of_oscillation(int m) const {
  const double w = 2.0 * std::numbers::pi / period_;
  double acc = 0.0;
  for (std::size_t k = 1; k < coeffs_.size(); ++k)
    acc += 2.0 * std::pow(1.0 + (w * k) * (w * k), m) * std::norm(coeffs_[k]);
  return std::sqrt(acc);
}

}  // namespace tpshock
