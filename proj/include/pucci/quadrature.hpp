/**
 * @file quadrature.hpp
 * @brief Thin adapters over Boost.Math quadrature and a least-squares line fit.
 */
#pragma once

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/gauss.hpp>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace pucci {

/// Adaptive Gauss-Kronrod on [a, b].
template <class F>
double integrate(F&& f, double a, double b, double rel_tol = 1e-12) {
  if (a == b) return 0.0;
  double err = 0.0;
  const double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 12, rel_tol, &err);
  if (!std::isfinite(v)) throw std::domain_error("quadrature produced a non-finite value");
  return v;
}

/// Integral over [a, infinity) by the exp-sinh rule.
template <class F>
double integrate_to_infinity(F&& f, double a, double rel_tol = 1e-12) {
  boost::math::quadrature::exp_sinh<double> rule;
  double err = 0.0, l1 = 0.0;
  std::size_t levels = 0;
  const double v = rule.integrate(f, a, std::numeric_limits<double>::infinity(), rel_tol, &err, &l1, &levels);
  if (!std::isfinite(v)) throw std::domain_error("quadrature produced a non-finite value");
  return v;
}

/// Fixed-order Gauss-Legendre on [a, b].
template <class F>
double gauss_legendre(F&& f, double a, double b) {
  return boost::math::quadrature::gauss<double, 20>::integrate(f, a, b);
}

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::size_t points = 0;
};

/// Ordinary least squares y = slope*x + intercept.
inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("fit needs equally many x and y values");
  if (x.size() < 2) throw std::invalid_argument("insufficient points");
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("fit needs at least two distinct abscissae");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  f.points = x.size();
  return f;
}

/// Fit log y = slope*log x + c; all values must be positive.
inline LineFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw std::invalid_argument("log-log fit needs positive data");
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  return fit_line(lx, ly);
}

}  // namespace pucci
