#pragma once

// Independent reference computations used by the tests. Nothing here calls
// into the library except for the coefficient function handed in.

#include <algorithm>
#include <cmath>
#include <functional>
#include <utility>
#include <vector>

namespace oracle {

using Fn = std::function<double(double)>;

/// Classical RK4 for d phi / dy = sigma(phi) over [0, y] with a fixed step count.
inline double rk4_flow(const Fn& sigma, double x, double y, int steps) {
  const double h = y / steps;
  double p = x;
  for (int i = 0; i < steps; ++i) {
    const double k1 = sigma(p);
    const double k2 = sigma(p + 0.5 * h * k1);
    const double k3 = sigma(p + 0.5 * h * k2);
    const double k4 = sigma(p + h * k3);
    p += h * (k1 + 2 * k2 + 2 * k3 + k4) / 6.0;
  }
  return p;
}

/// Step-doubling Richardson extrapolation of rk4_flow (order 4 -> 5).
inline double richardson_flow(const Fn& sigma, double x, double y, int steps = 2000) {
  const double coarse = rk4_flow(sigma, x, y, steps);
  const double fine = rk4_flow(sigma, x, y, 2 * steps);
  return fine + (fine - coarse) / 15.0;
}

/// Composite Simpson rule with Richardson correction.
inline double simpson(const Fn& f, double a, double b, int panels = 4000) {
  auto rule = [&](int m) {
    const double h = (b - a) / (2 * m);
    double s = f(a) + f(b);
    for (int i = 1; i < 2 * m; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
  };
  const double coarse = rule(panels);
  const double fine = rule(2 * panels);
  return fine + (fine - coarse) / 15.0;
}

/// Central finite difference of order 4.
inline double derivative(const Fn& f, double x, double h = 1e-3) {
  return (f(x - 2 * h) - 8 * f(x - h) + 8 * f(x + h) - f(x + 2 * h)) / (12 * h);
}

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t k = v.size();
  return k % 2 ? v[k / 2] : 0.5 * (v[k / 2 - 1] + v[k / 2]);
}

inline double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

/// Standard error of the mean.
inline double sem(const std::vector<double>& v) {
  const double m = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  const double k = static_cast<double>(v.size());
  return std::sqrt(ss / (k - 1) / k);
}

/// OLS slope of log(y) on log(x).
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double k = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= k;
  my /= k;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
    sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
  }
  return sxy / sxx;
}

/// Medians over a doubling sequence of n count as decreasing when the last is
/// below the first and the log-log trend is negative.
inline bool decreasing_medians(const std::vector<double>& ns, const std::vector<double>& medians) {
  return medians.back() < medians.front() && loglog_slope(ns, medians) < 0.0;
}

}  // namespace oracle
