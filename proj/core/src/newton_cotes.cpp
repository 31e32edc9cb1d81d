#include "fsde/newton_cotes.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace fsde {

std::string format_rational(const Rational& r) {
  const auto num = boost::multiprecision::numerator(r);
  const auto den = boost::multiprecision::denominator(r);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

std::vector<double> NCWeights::nodes_double() const {
  std::vector<double> out;
  out.reserve(nodes.size());
  for (const auto& r : nodes) out.push_back(r.convert_to<double>());
  return out;
}

std::vector<double> NCWeights::weights_double() const {
  std::vector<double> out;
  out.reserve(weights.size());
  for (const auto& r : weights) out.push_back(r.convert_to<double>());
  return out;
}

Rational NCWeights::moment(int p) const {
  Rational total = 0;
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    Rational power = 1;
    for (int k = 0; k < p; ++k) power *= nodes[j];
    total += weights[j] * power;
  }
  return total;
}

std::string NCWeights::to_string() const {
  std::string out;
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    if (j) out += ", ";
    out += format_rational(nodes[j]) + ": " + format_rational(weights[j]);
  }
  return out;
}

NCWeights nc_weights(int order) {
  if (order < 0) throw std::invalid_argument("nc_weights: order must be >= 0");
  NCWeights w;
  w.order = order;
  if (order == 0) {
    w.nodes = {Rational(0)};
    w.weights = {Rational(1)};
    return w;
  }
  if (order == 1) {
    w.nodes = {Rational(0), Rational(1)};
    w.weights = {Rational(1, 2), Rational(1, 2)};
    return w;
  }
  const int last = 2 * order - 2;
  for (int j = 0; j <= last; ++j) {
    // Coefficients (ascending powers of u) of prod_{k != j} (last*u - k) / (j - k).
    std::vector<Rational> poly{Rational(1)};
    for (int k = 0; k <= last; ++k) {
      if (k == j) continue;
      const Rational denom(j - k);
      std::vector<Rational> next(poly.size() + 1, Rational(0));
      for (std::size_t i = 0; i < poly.size(); ++i) {
        next[i] -= poly[i] * Rational(k) / denom;
        next[i + 1] += poly[i] * Rational(last) / denom;
      }
      poly = std::move(next);
    }
    Rational integral = 0;
    for (std::size_t i = 0; i < poly.size(); ++i) integral += poly[i] / Rational(i + 1);
    w.nodes.emplace_back(j, last);
    w.weights.push_back(integral);
  }
  return w;
}

const NCWeights& nc_weights_cached(int order) {
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<const NCWeights>> table;
  std::lock_guard lock(mutex);
  auto& slot = table[order];
  if (!slot) slot = std::make_unique<const NCWeights>(nc_weights(order));
  return *slot;
}

int newton_cotes_order_for(double hurst) {
  if (!(hurst > 0.0 && hurst < 1.0)) throw std::invalid_argument("Hurst index must lie in (0, 1)");
  int order = 1;
  while (!(hurst > 1.0 / (4 * order + 2))) ++order;
  return order;
}

double nc_functional_sum(const Expression& f, const FbmPath& path, int order) {
  const NCWeights& w = nc_weights_cached(order);
  const std::vector<double> nodes = w.nodes_double();
  const std::vector<double> weights = w.weights_double();
  const CompiledExpression fc(f);
  double total = 0.0;
  for (int l = 0; l < path.n(); ++l) {
    const double b = path.values[l];
    const double db = path.increment(l);
    double inner = 0.0;
    for (std::size_t a = 0; a < nodes.size(); ++a) inner += weights[a] * fc(b + nodes[a] * db);
    total += db * inner;
  }
  return total;
}

}  // namespace fsde
