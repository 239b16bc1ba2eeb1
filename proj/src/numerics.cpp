#include "tpshock/numerics.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numeric>

#include "tpshock/error.hpp"

namespace tpshock {

double simpson(const std::function<double(double)>& g, double a, double b, std::size_t n) {
  if (n < 2) n = 2;
  if (n % 2) ++n;
  const double h = (b - a) / double(n);
  double acc = g(a) + g(b);
  for (std::size_t j = 1; j < n; ++j) acc += (j % 2 ? 4.0 : 2.0) * g(a + h * double(j));
  return acc * h / 3.0;
}

double trapezoid(std::span<const double> y, double h) {
  if (y.size() < 2) return 0.0;
  double acc = 0.5 * (y.front() + y.back());
  for (std::size_t j = 1; j + 1 < y.size(); ++j) acc += y[j];
  return acc * h;
}

double gauss_legendre_16(const std::function<double(double)>& g, double a, double b) {
  return boost::math::quadrature::gauss<double, 16>::integrate(g, a, b);
}

double adaptive_integral(const std::function<double(double)>& g, double a, double b, double tol,
                         unsigned max_depth) {
  using boost::math::quadrature::gauss_kronrod;
  double err = 0.0;
  return gauss_kronrod<double, 15>::integrate(g, a, b, max_depth, tol, &err);
}

double golden_minimize(const std::function<double(double)>& g, double a, double b, double tol) {
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - r * (b - a), d = a + r * (b - a);
  double gc = g(c), gd = g(d);
  while (b - a > tol) {
    if (gc <= gd) {
      b = d; d = c; gd = gc;
      c = b - r * (b - a); gc = g(c);
    } else {
      a = c; c = d; gc = gd;
      d = a + r * (b - a); gd = g(d);
    }
  }
  return gc <= gd ? c : d;
}

RateFit fit_line(std::vector<double> x, std::vector<double> y) {
  if (x.size() != y.size()) throw Error(ErrorKind::InvalidArgument, "fit: size mismatch");
  if (x.size() < 5) throw Error(ErrorKind::InvalidArgument, "fit: fewer than 5 points");
  const double n = double(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  RateFit fit;
  fit.slope = sxx > 0 ? sxy / sxx : 0.0;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = (sxx > 0 && syy > 0) ? (sxy * sxy) / (sxx * syy) : 1.0;
  fit.abscissae = std::move(x);
  fit.ordinates = std::move(y);
  return fit;
}

RateFit fit_loglog(std::span<const double> x, std::span<const double> y) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (y[i] > 0 && x[i] > 0) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(y[i]));
    }
  return fit_line(std::move(lx), std::move(ly));
}

RateFit fit_semilog(std::span<const double> x, std::span<const double> y) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (y[i] > 0) {
      lx.push_back(x[i]);
      ly.push_back(std::log(y[i]));
    }
  return fit_line(std::move(lx), std::move(ly));
}

double interp_uniform(std::span<const double> y, double x0, double h, double x) {
  const double p = (x - x0) / h;
  if (p <= 0) return y.front();
  const std::size_t last = y.size() - 1;
  if (p >= double(last)) return y.back();
  const std::size_t j = static_cast<std::size_t>(p);
  const double w = p - double(j);
  return (1.0 - w) * y[j] + w * y[j + 1];
}

void solve_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                       std::span<const double> upper, std::span<double> rhs) {
  const std::size_t n = diag.size();
  std::vector<double> c(n);
  double beta = diag[0];
  rhs[0] /= beta;
  for (std::size_t i = 1; i < n; ++i) {
    c[i] = upper[i - 1] / beta;
    beta = diag[i] - lower[i] * c[i];
    rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / beta;
  }
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= c[i + 1] * rhs[i + 1];
}

}  // namespace tpshock
