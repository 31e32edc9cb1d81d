#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fsde/expr.hpp"

namespace fsde {

/// Raised when an operation needs inf|sigma| > 0 and the probe says otherwise.
class EllipticityError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct ProbeOptions {
  double lo = -20.0;
  double hi = 20.0;
  std::size_t points = 100000;
  /// Number of symbolic derivatives of sigma kept in the cache (>= 1).
  int cached_orders = 4;
  /// User assertion that sigma and its derivatives are bounded on R.
  bool bounded = false;
};

/// A diffusion coefficient sigma together with its derivative cache and a
/// numerical ellipticity certificate. Immutable; copies share state.
class Coefficient {
 public:
  explicit Coefficient(Expression sigma, ProbeOptions options = {});
  static Coefficient parse(std::string_view text, ProbeOptions options = {});

  const Expression& sigma() const noexcept;
  const CompiledExpression& compiled_sigma() const noexcept;

  /// j-th symbolic derivative of sigma. Cached orders are returned directly,
  /// higher orders are computed on each call.
  Expression derivative(int order) const;

  /// min |sigma| over the probe grid, or 0 when sigma changes sign there.
  double ellipticity() const noexcept;
  bool is_elliptic() const noexcept { return ellipticity() > 0.0; }
  /// Throws EllipticityError naming `operation` unless is_elliptic().
  void require_elliptic(std::string_view operation) const;

  /// max |sigma^{(order)}| over the probe grid.
  double max_abs_derivative(int order) const;

  bool bounded_asserted() const noexcept;
  bool is_constant() const noexcept;
  const std::vector<std::string>& warnings() const noexcept;
  const ProbeOptions& probe() const noexcept;

 private:
  struct State;
  std::shared_ptr<const State> state_;
};

/// Largest supported scheme size; keeps (m+3)! exact in 64 bits.
inline constexpr int kMaxSchemeSize = 12;

/// Exact n! for n <= 20.
std::uint64_t factorial(int n);

/// D^j f with D^0 f = f and D^1 f = f' sigma, iterated.
Expression d_operator(const Coefficient& c, const Expression& f, int j);

/// D^j sigma.
inline Expression d_sigma(const Coefficient& c, int j) { return d_operator(c, c.sigma(), j); }

/// h_m = -(D^{m+1} sigma / sigma) / (m+2)!
Expression h_function(const Coefficient& c, int m);

/// g_m = -sigma' h_m + h_{m+1}
Expression g_function(const Coefficient& c, int m);

/// 3 sigma'^3 + 6 sigma sigma' sigma'' + sigma^2 sigma'''.
Expression prop1_expression(const Coefficient& c);

/// max |e(x)| over `points` equally spaced nodes of [lo, hi].
double max_abs_on_interval(const Expression& e, double lo, double hi, std::size_t points = 10001);

}  // namespace fsde
