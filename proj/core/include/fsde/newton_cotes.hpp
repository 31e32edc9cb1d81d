#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <string>
#include <vector>

#include "fsde/expr.hpp"
#include "fsde/fbm.hpp"

namespace fsde {

using Rational = boost::multiprecision::cpp_rational;

/// The signed discrete measure nu_N on [0, 1]:
///   nu_0 = delta_0, nu_1 = (delta_0 + delta_1) / 2, and for N >= 2 the
///   closed Newton-Cotes rule on the nodes j / (2N - 2), j = 0..2N-2.
struct NCWeights {
  int order = 0;
  std::vector<Rational> nodes;
  std::vector<Rational> weights;

  std::vector<double> nodes_double() const;
  std::vector<double> weights_double() const;

  /// sum_j w_j * node_j^p, exact.
  Rational moment(int p) const;

  /// "node: weight" pairs separated by ", ", e.g. "0: 1/6, 1/2: 2/3, 1: 1/6".
  std::string to_string() const;
};

/// Exact weights; for N >= 2 each weight is the integral over [0, 1] of the
/// Lagrange basis polynomial of its node.
NCWeights nc_weights(int order);

/// Same as nc_weights, memoised in a process-wide table.
const NCWeights& nc_weights_cached(int order);

/// Smallest N >= 1 with H > 1/(4N + 2).
int newton_cotes_order_for(double hurst);

/// Grid version of the order-N Newton-Cotes integral of f(B) against B on
/// [0, 1]:  sum_l dB_l sum_a w_a f(B_{l/n} + a dB_l).
double nc_functional_sum(const Expression& f, const FbmPath& path, int order);

std::string format_rational(const Rational& r);

}  // namespace fsde
