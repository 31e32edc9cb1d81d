#include "fsde/coefficient.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fsde {

struct Coefficient::State {
  Expression sigma;
  CompiledExpression compiled;
  std::vector<Expression> derivatives;  // derivatives[j] = sigma^{(j)}
  ProbeOptions probe;
  double ellipticity = 0.0;
  bool constant = false;
  std::vector<std::string> warnings;
};

namespace {

double probe_node(const ProbeOptions& p, std::size_t i) {
  if (p.points < 2) return p.lo;
  return p.lo + (p.hi - p.lo) * static_cast<double>(i) / static_cast<double>(p.points - 1);
}

}  // namespace

Coefficient::Coefficient(Expression sigma, ProbeOptions options) {
  if (options.points < 2 || !(options.hi > options.lo)) {
    throw std::invalid_argument("Coefficient: probe interval needs hi > lo and >= 2 points");
  }
  options.cached_orders = std::max(options.cached_orders, 1);

  auto s = std::make_shared<State>();
  s->sigma = simplify(sigma);
  s->compiled = CompiledExpression(s->sigma);
  s->probe = options;
  s->constant = s->sigma.is_variable_free();
  s->derivatives.push_back(s->sigma);
  for (int j = 1; j <= options.cached_orders; ++j) {
    s->derivatives.push_back(differentiate(s->derivatives.back()));
  }

  double min_abs = std::numeric_limits<double>::infinity();
  double max_abs_inner = 0.0;
  double max_abs = 0.0;
  double previous = 0.0;
  bool sign_change = false;
  bool nonfinite = false;
  const double inner_lo = options.lo / 2.0;
  const double inner_hi = options.hi / 2.0;
  for (std::size_t i = 0; i < options.points; ++i) {
    const double x = probe_node(options, i);
    const double v = s->compiled(x);
    if (!std::isfinite(v)) {
      nonfinite = true;
      continue;
    }
    if (i > 0 && ((previous > 0.0 && v < 0.0) || (previous < 0.0 && v > 0.0))) sign_change = true;
    previous = v;
    min_abs = std::min(min_abs, std::abs(v));
    max_abs = std::max(max_abs, std::abs(v));
    if (x >= inner_lo && x <= inner_hi) max_abs_inner = std::max(max_abs_inner, std::abs(v));
  }
  s->ellipticity = (sign_change || nonfinite || !std::isfinite(min_abs)) ? 0.0 : min_abs;

  if (nonfinite) s->warnings.emplace_back("sigma is not finite somewhere on the probe interval");
  if (!options.bounded && max_abs > 1.5 * max_abs_inner + 1e-12) {
    s->warnings.emplace_back(
        "sigma grows across the probe interval; boundedness is assumed but not asserted");
  }
  state_ = std::move(s);
}

Coefficient Coefficient::parse(std::string_view text, ProbeOptions options) {
  return Coefficient(parse_sigma(text), options);
}

const Expression& Coefficient::sigma() const noexcept { return state_->sigma; }
const CompiledExpression& Coefficient::compiled_sigma() const noexcept { return state_->compiled; }

Expression Coefficient::derivative(int order) const {
  if (order < 0) throw std::invalid_argument("Coefficient::derivative: negative order");
  const auto& cache = state_->derivatives;
  if (static_cast<std::size_t>(order) < cache.size()) return cache[static_cast<std::size_t>(order)];
  return differentiate(cache.back(), order - static_cast<int>(cache.size()) + 1);
}

double Coefficient::ellipticity() const noexcept { return state_->ellipticity; }

void Coefficient::require_elliptic(std::string_view operation) const {
  if (!is_elliptic()) {
    throw EllipticityError(std::string(operation) + ": sigma = " + sigma().to_string() +
                           " is not bounded away from zero on the probe interval");
  }
}

double Coefficient::max_abs_derivative(int order) const {
  const auto& p = state_->probe;
  return max_abs_on_interval(derivative(order), p.lo, p.hi, p.points);
}

bool Coefficient::bounded_asserted() const noexcept { return state_->probe.bounded; }
bool Coefficient::is_constant() const noexcept { return state_->constant; }
const std::vector<std::string>& Coefficient::warnings() const noexcept { return state_->warnings; }
const ProbeOptions& Coefficient::probe() const noexcept { return state_->probe; }

std::uint64_t factorial(int n) {
  if (n < 0 || n > 20) throw std::out_of_range("factorial: argument outside [0, 20]");
  std::uint64_t r = 1;
  for (int i = 2; i <= n; ++i) r *= static_cast<std::uint64_t>(i);
  return r;
}

Expression d_operator(const Coefficient& c, const Expression& f, int j) {
  if (j < 0) throw std::invalid_argument("d_operator: negative order");
  Expression result = f;
  for (int i = 0; i < j; ++i) result = differentiate(result) * c.sigma();
  return result;
}

Expression h_function(const Coefficient& c, int m) {
  if (m < 0 || m > kMaxSchemeSize + 1) throw std::out_of_range("h_function: m outside [0, 13]");
  c.require_elliptic("h_function");
  const double scale = -1.0 / static_cast<double>(factorial(m + 2));
  return scale * (d_sigma(c, m + 1) / c.sigma());
}

Expression g_function(const Coefficient& c, int m) {
  if (m < 0 || m > kMaxSchemeSize) throw std::out_of_range("g_function: m outside [0, 12]");
  c.require_elliptic("g_function");
  return h_function(c, m + 1) - c.derivative(1) * h_function(c, m);
}

Expression prop1_expression(const Coefficient& c) {
  const Expression s = c.sigma();
  const Expression s1 = c.derivative(1);
  const Expression s2 = c.derivative(2);
  const Expression s3 = c.derivative(3);
  return sum({3.0 * pow(s1, 3), product({Expression::constant(6.0), s, s1, s2}),
              pow(s, 2) * s3});
}

double max_abs_on_interval(const Expression& e, double lo, double hi, std::size_t points) {
  if (points < 2) throw std::invalid_argument("max_abs_on_interval: need >= 2 points");
  const CompiledExpression f(e);
  double best = 0.0;
  for (std::size_t i = 0; i < points; ++i) {
    const double x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
    best = std::max(best, std::abs(f(x)));
  }
  return best;
}

}  // namespace fsde
