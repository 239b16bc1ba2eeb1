#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace tpshock {

/// Composite Simpson on [a, b] with n (rounded up to even) subintervals.
double simpson(const std::function<double(double)>& g, double a, double b, std::size_t n);

/// Trapezoid rule on uniform samples with spacing h.
double trapezoid(std::span<const double> y, double h);

/// Fixed 16-point Gauss-Legendre rule on [a, b].
double gauss_legendre_16(const std::function<double(double)>& g, double a, double b);

/// Adaptive Gauss-Kronrod (15 points); tolerates isolated jump discontinuities.
double adaptive_integral(const std::function<double(double)>& g, double a, double b,
                         double tol = 1e-11, unsigned max_depth = 40);

/// Golden-section minimisation on [a, b].
double golden_minimize(const std::function<double(double)>& g, double a, double b,
                       double tol = 1e-12);

/// Ordinary least squares y = slope x + intercept.
struct RateFit {
  std::vector<double> abscissae;
  std::vector<double> ordinates;
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Rejects fits with fewer than 5 points (InvalidArgument).
RateFit fit_line(std::vector<double> x, std::vector<double> y);
/// Fits log y against log x; points with y <= 0 are dropped.
RateFit fit_loglog(std::span<const double> x, std::span<const double> y);
/// Fits log y against x; points with y <= 0 are dropped.
RateFit fit_semilog(std::span<const double> x, std::span<const double> y);

/// Linear interpolation on a uniform grid x0 + j h; clamps outside.
double interp_uniform(std::span<const double> y, double x0, double h, double x);

/// Solves a tridiagonal system in place (Thomas algorithm); rhs is overwritten with the solution.
void solve_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                       std::span<const double> upper, std::span<double> rhs);

}  // namespace tpshock
