#include "fsde/limits.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <sstream>

#include "fsde/rng.hpp"

namespace fsde {

const char* to_string(LimitRegime regime) noexcept {
  switch (regime) {
    case LimitRegime::even: return "even";
    case LimitRegime::odd_small_h: return "odd_small_h";
    case LimitRegime::odd_half: return "odd_half";
    case LimitRegime::odd_large_h: return "odd_large_h";
  }
  return "?";
}

LimitRegime classify_limit_regime(int m, double hurst) {
  if (m < 0 || m > kMaxSchemeSize) {
    throw RegimeError("scheme size m = " + std::to_string(m) + " outside [0, " +
                      std::to_string(kMaxSchemeSize) + "]");
  }
  const double lower = 1.0 / (m + 2);
  if (!(hurst > lower && hurst < 1.0)) {
    std::ostringstream os;
    os << "H = " << hurst << " violates 1/(m+2) < H < 1 with m = " << m << " (1/(m+2) = " << lower
       << ")";
    throw RegimeError(os.str());
  }
  if (m % 2 == 0) return LimitRegime::even;
  if (std::abs(hurst - 0.5) <= kHalfTolerance) return LimitRegime::odd_half;
  return hurst < 0.5 ? LimitRegime::odd_small_h : LimitRegime::odd_large_h;
}

double rate_exponent(int m, double hurst) {
  switch (classify_limit_regime(m, hurst)) {
    case LimitRegime::even: return (m + 2) * hurst - 1.0;
    case LimitRegime::odd_small_h: return (m + 3) * hurst - 1.0;
    case LimitRegime::odd_half: return 0.5 * (m + 1);
    case LimitRegime::odd_large_h: return (m + 1) * hurst;
  }
  return 0.0;
}

Expression small_h_integrand_expression(const Coefficient& c, int m) {
  const Expression h = h_function(c, m);
  return g_function(c, m) - 0.5 * (c.sigma() * differentiate(h));
}

LimitEvaluator::LimitEvaluator(Coefficient coefficient, int m, FlowTolerance tolerance)
    : m_(m), flow_(std::move(coefficient), tolerance) {
  if (m < 0 || m > kMaxSchemeSize) {
    throw RegimeError("scheme size m = " + std::to_string(m) + " outside [0, " +
                      std::to_string(kMaxSchemeSize) + "]");
  }
  const Coefficient& c = flow_.coefficient();
  sigma_ = c.compiled_sigma();
  h_ = CompiledExpression(h_function(c, m));
  g_ = CompiledExpression(g_function(c, m));
  small_h_integrand_ = CompiledExpression(small_h_integrand_expression(c, m));
}

void LimitEvaluator::require(LimitRegime wanted, double hurst, const char* operation) const {
  const LimitRegime actual = classify_limit_regime(m_, hurst);
  if (actual == wanted) return;
  std::ostringstream os;
  os << operation << ": (m = " << m_ << ", H = " << hurst << ") belongs to regime "
     << to_string(actual) << "; this limit needs ";
  switch (wanted) {
    case LimitRegime::even: os << "m even"; break;
    case LimitRegime::odd_small_h: os << "m odd and H < 1/2"; break;
    case LimitRegime::odd_half: os << "m odd and H = 1/2"; break;
    case LimitRegime::odd_large_h: os << "m odd and H > 1/2"; break;
  }
  throw RegimeError(os.str());
}

double LimitEvaluator::riemann(const CompiledExpression& f, std::span<const double> x_path,
                               int n) const {
  if (x_path.size() != static_cast<std::size_t>(n) + 1) {
    throw std::invalid_argument("LimitEvaluator: x_path must have n + 1 values");
  }
  double total = 0.0;
  for (int l = 0; l < n; ++l) total += f(x_path[l]);
  return total / n;
}

double LimitEvaluator::even(const FbmPath& path, std::span<const double> x_path) const {
  require(LimitRegime::even, path.hurst, "limit_even");
  const double mu = static_cast<double>(gaussian_moment(m_ + 2));
  return mu * sigma_(x_path.back()) * riemann(h_, x_path, path.n());
}

double LimitEvaluator::odd_small_h(const FbmPath& path, std::span<const double> x_path) const {
  require(LimitRegime::odd_small_h, path.hurst, "limit_odd_small_h");
  const double mu = static_cast<double>(gaussian_moment(m_ + 3));
  return mu * sigma_(x_path.back()) * riemann(small_h_integrand_, x_path, path.n());
}

double LimitEvaluator::odd_large_h(double x0, const FbmPath& path,
                                   std::span<const double> x_path) const {
  require(LimitRegime::odd_large_h, path.hurst, "limit_odd_large_h");
  const double b1 = path.endpoint();
  const double mu = static_cast<double>(gaussian_moment(m_ + 3));
  if (b1 == 0.0) return 0.0;
  auto integrand = [&](double y) { return h_(flow_.eval(x0, y)); };
  double error = 0.0;
  const double integral = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      integrand, 0.0, b1, 15, 1e-10, &error);
  if (!std::isfinite(integral) || error > 1e-8 * std::max(1.0, std::abs(integral))) {
    throw QuadratureError("limit_odd_large_h: quadrature error estimate " + std::to_string(error));
  }
  return mu * sigma_(x_path.back()) * integral;
}

double LimitEvaluator::half_conditional_mean(const FbmPath& path,
                                             std::span<const double> x_path) const {
  require(LimitRegime::odd_half, path.hurst, "limit_half_sample");
  const int n = path.n();
  const double mu = static_cast<double>(gaussian_moment(m_ + 3));
  double ito_db = 0.0;
  for (int l = 0; l < n; ++l) ito_db += h_(x_path[l]) * path.increment(l);
  return sigma_(x_path.back()) * (mu * ito_db + mu * riemann(g_, x_path, n));
}

double LimitEvaluator::half_sample(const FbmPath& path, std::span<const double> x_path,
                                   std::uint64_t wseed) const {
  require(LimitRegime::odd_half, path.hurst, "limit_half_sample");
  const int n = path.n();
  const double mu = static_cast<double>(gaussian_moment(m_ + 3));
  const double root = std::sqrt(static_cast<double>(gaussian_moment(2 * m_ + 4)) - mu * mu);
  const double dw_scale = 1.0 / std::sqrt(static_cast<double>(n));
  NormalStream normal(wseed);
  double ito_dw = 0.0;
  double ito_db = 0.0;
  for (int l = 0; l < n; ++l) {
    const double hl = h_(x_path[l]);
    ito_dw += hl * normal() * dw_scale;
    ito_db += hl * path.increment(l);
  }
  return sigma_(x_path.back()) * (root * ito_dw + mu * ito_db + mu * riemann(g_, x_path, n));
}

LimitEvaluation LimitEvaluator::evaluate(double x0, const FbmPath& path,
                                         std::span<const double> x_path,
                                         std::uint64_t wseed) const {
  LimitEvaluation out;
  out.regime = classify_limit_regime(m_, path.hurst);
  out.path_seed = path.seed;
  switch (out.regime) {
    case LimitRegime::even: out.value = even(path, x_path); break;
    case LimitRegime::odd_small_h: out.value = odd_small_h(path, x_path); break;
    case LimitRegime::odd_half: out.value = half_sample(path, x_path, wseed); break;
    case LimitRegime::odd_large_h: out.value = odd_large_h(x0, path, x_path); break;
  }
  return out;
}

double limit_even(const Coefficient& c, int m, double x0, const FbmPath& path) {
  const LimitEvaluator ev(c, m);
  return ev.even(path, ev.flow().path(x0, path));
}

double limit_odd_small_h(const Coefficient& c, int m, double x0, const FbmPath& path) {
  const LimitEvaluator ev(c, m);
  return ev.odd_small_h(path, ev.flow().path(x0, path));
}

double limit_odd_large_h(const Coefficient& c, int m, double x0, const FbmPath& path) {
  const LimitEvaluator ev(c, m);
  return ev.odd_large_h(x0, path, ev.flow().path(x0, path));
}

double limit_half_sample(const Coefficient& c, int m, double x0, const FbmPath& path,
                         std::uint64_t wseed) {
  const LimitEvaluator ev(c, m);
  return ev.half_sample(path, ev.flow().path(x0, path), wseed);
}

}  // namespace fsde
