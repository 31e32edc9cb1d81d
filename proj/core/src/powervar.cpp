#include "fsde/powervar.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "fsde/rng.hpp"

namespace fsde {

namespace {

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r = 0;
  if (__builtin_mul_overflow(a, b, &r)) throw std::overflow_error("integer overflow in Hermite table");
  return r;
}

std::int64_t checked_sub(std::int64_t a, std::int64_t b) {
  std::int64_t r = 0;
  if (__builtin_sub_overflow(a, b, &r)) throw std::overflow_error("integer overflow in Hermite table");
  return r;
}

}  // namespace

std::uint64_t gaussian_moment(int k) {
  if (k < 0) throw std::invalid_argument("gaussian_moment: negative order");
  if (k % 2 == 1) return 0;
  if (k > 34) throw std::out_of_range("gaussian_moment: (k-1)!! overflows 64 bits for k > 34");
  std::uint64_t r = 1;
  for (int i = k - 1; i > 1; i -= 2) r *= static_cast<std::uint64_t>(i);
  return r;
}

MomentTable::MomentTable(int max_degree) : max_degree_(max_degree) {
  if (max_degree < 0 || max_degree > 34) throw std::out_of_range("MomentTable: degree outside [0, 34]");
  moments_.resize(max_degree + 1, 0);
  moments_[0] = 1;
  for (int k = 2; k <= max_degree; k += 2) {
    moments_[k] = static_cast<std::uint64_t>(k - 1) * moments_[k - 2];
  }
}

std::uint64_t MomentTable::operator[](int k) const {
  if (k < 0 || k > max_degree_) throw std::out_of_range("MomentTable: degree out of range");
  return moments_[k];
}

HermiteBasis::HermiteBasis(int max_degree) {
  if (max_degree < 0) throw std::invalid_argument("HermiteBasis: negative degree");
  table_.push_back({1});
  if (max_degree >= 1) table_.push_back({0, 1});
  for (int q = 1; q < max_degree; ++q) {
    const auto& hq = table_[q];
    const auto& hprev = table_[q - 1];
    std::vector<std::int64_t> next(q + 2, 0);
    for (std::size_t i = 0; i < hq.size(); ++i) next[i + 1] = hq[i];
    for (std::size_t i = 0; i < hprev.size(); ++i) {
      next[i] = checked_sub(next[i], checked_mul(q, hprev[i]));
    }
    table_.push_back(std::move(next));
  }
}

const std::vector<std::int64_t>& HermiteBasis::coefficients(int q) const {
  if (q < 0 || q > max_degree()) throw std::out_of_range("HermiteBasis: degree out of range");
  return table_[q];
}

double HermiteBasis::evaluate(int q, double x) {
  if (q < 0) throw std::invalid_argument("HermiteBasis::evaluate: negative degree");
  if (q == 0) return 1.0;
  double prev = 1.0;
  double cur = x;
  for (int k = 1; k < q; ++k) {
    const double next = x * cur - k * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

std::int64_t OddMonomialExpansion::coefficient(int degree) const {
  for (const auto& [d, a] : terms) {
    if (d == degree) return a;
  }
  return 0;
}

OddMonomialExpansion hermite_expand_odd_monomial(int kappa) {
  if (kappa < 3 || kappa % 2 == 0) {
    throw std::invalid_argument("hermite_expand_odd_monomial: kappa must be odd and >= 3, got " +
                                std::to_string(kappa));
  }
  const HermiteBasis basis(kappa);
  std::vector<std::int64_t> residual(kappa + 1, 0);
  residual[kappa] = 1;
  residual[1] = -static_cast<std::int64_t>(gaussian_moment(kappa + 1));

  OddMonomialExpansion out;
  out.kappa = kappa;
  // Every H_q is monic, so peeling from the top degree is an exact
  // triangular solve.
  for (int d = kappa; d >= 3; d -= 2) {
    const std::int64_t a = residual[d];
    if (a == 0) continue;
    const auto& hd = basis.coefficients(d);
    for (int i = 0; i <= d; ++i) residual[i] = checked_sub(residual[i], checked_mul(a, hd[i]));
    out.terms.emplace_back(d, a);
  }
  for (std::int64_t r : residual) {
    if (r != 0) throw std::logic_error("hermite_expand_odd_monomial: nonzero remainder");
  }
  std::reverse(out.terms.begin(), out.terms.end());
  return out;
}

double weighted_power_variation(const CompiledExpression& h, std::span<const double> points,
                                const FbmPath& path, int kappa) {
  if (kappa < 1) throw std::invalid_argument("weighted_power_variation: kappa must be >= 1");
  const int n = path.n();
  if (points.size() < static_cast<std::size_t>(n)) {
    throw std::invalid_argument("weighted_power_variation: too few weight points");
  }
  double total = 0.0;
  for (int l = 0; l < n; ++l) {
    const double db = path.increment(l);
    double p = db;
    for (int k = 1; k < kappa; ++k) p *= db;
    total += h(points[l]) * p;
  }
  return total;
}

double weighted_power_variation(const Expression& h, const FbmPath& path, int kappa) {
  return weighted_power_variation(CompiledExpression(h), path.values, path, kappa);
}

double weighted_power_variation(const Expression& h, const FlowSolver& flow, double x0,
                                const FbmPath& path, int kappa) {
  const std::vector<double> x = flow.path(x0, path);
  return weighted_power_variation(CompiledExpression(h), x, path, kappa);
}

const char* to_string(PowerRegime regime) noexcept {
  switch (regime) {
    case PowerRegime::even: return "even";
    case PowerRegime::odd_rough: return "odd_rough";
    case PowerRegime::odd_brownian: return "odd_brownian";
    case PowerRegime::odd_smooth: return "odd_smooth";
  }
  return "?";
}

PowerRegime classify_power_regime(int kappa, double hurst) {
  if (kappa < 1) throw std::invalid_argument("power variation order kappa must be >= 1");
  if (!(hurst > 0.0 && hurst < 1.0)) throw std::invalid_argument("Hurst index must lie in (0, 1)");
  if (kappa % 2 == 0) return PowerRegime::even;
  if (std::abs(hurst - 0.5) <= kHalfTolerance) return PowerRegime::odd_brownian;
  return hurst < 0.5 ? PowerRegime::odd_rough : PowerRegime::odd_smooth;
}

double power_variation_exponent(int kappa, double hurst) {
  switch (classify_power_regime(kappa, hurst)) {
    case PowerRegime::even: return kappa * hurst - 1.0;
    case PowerRegime::odd_rough: return (kappa + 1) * hurst - 1.0;
    case PowerRegime::odd_brownian: return 0.5 * (kappa - 1);
    case PowerRegime::odd_smooth: return (kappa - 1) * hurst;
  }
  return 0.0;
}

double scaled_variation(double raw, int n, int kappa, double hurst) {
  return raw * std::pow(static_cast<double>(n), power_variation_exponent(kappa, hurst));
}

double scaled_variation(double raw, int n, int kappa, double hurst, PowerRegime expected) {
  const PowerRegime actual = classify_power_regime(kappa, hurst);
  if (actual != expected) {
    throw RegimeError(std::string("power variation regime mismatch: kappa = ") +
                      std::to_string(kappa) + ", H = " + std::to_string(hurst) + " is " +
                      to_string(actual) + ", not " + to_string(expected));
  }
  return scaled_variation(raw, n, kappa, hurst);
}

double s_statistic(const CompiledExpression& f, std::span<const double> points,
                   const FbmPath& path, int q, int k) {
  if (q < 2) throw std::invalid_argument("s_statistic: q must be >= 2");
  const int n = path.n();
  if (k < 1 || k > n) throw std::invalid_argument("s_statistic: k must lie in [1, n]");
  if (points.size() < static_cast<std::size_t>(k)) {
    throw std::invalid_argument("s_statistic: too few weight points");
  }
  const double scale = std::pow(static_cast<double>(n), path.hurst);
  double total = 0.0;
  for (int j = 0; j < k; ++j) {
    total += f(points[j]) * HermiteBasis::evaluate(q, scale * path.increment(j));
  }
  return total;
}

double power_variation_limit(const Expression& h, const FbmPath& path, int kappa,
                             std::uint64_t wseed) {
  const int n = path.n();
  const CompiledExpression hc(h);
  auto riemann = [&](const CompiledExpression& f) {
    double total = 0.0;
    for (int l = 0; l < n; ++l) total += f(path.values[l]);
    return total / n;
  };
  switch (classify_power_regime(kappa, path.hurst)) {
    case PowerRegime::even:
      return static_cast<double>(gaussian_moment(kappa)) * riemann(hc);
    case PowerRegime::odd_rough:
      return -0.5 * static_cast<double>(gaussian_moment(kappa + 1)) *
             riemann(CompiledExpression(differentiate(h)));
    case PowerRegime::odd_brownian: {
      const double mu = static_cast<double>(gaussian_moment(kappa + 1));
      const double root = std::sqrt(static_cast<double>(gaussian_moment(2 * kappa)) - mu * mu);
      const double dw_scale = 1.0 / std::sqrt(static_cast<double>(n));
      NormalStream normal(wseed);
      double total = 0.0;
      for (int l = 0; l < n; ++l) {
        const double w = hc(path.values[l]);
        total += w * (root * normal() * dw_scale + mu * path.increment(l));
      }
      return total;
    }
    case PowerRegime::odd_smooth: {
      const double b1 = path.endpoint();
      if (b1 == 0.0) return 0.0;
      const double integral = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
          [&](double u) { return hc(u); }, 0.0, b1, 15, 1e-12);
      return static_cast<double>(gaussian_moment(kappa + 1)) * integral;
    }
  }
  return 0.0;
}

}  // namespace fsde
