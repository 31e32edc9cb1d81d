#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>

#include "fsde/coefficient.hpp"
#include "fsde/fbm.hpp"
#include "fsde/flow.hpp"
#include "fsde/powervar.hpp"

namespace fsde {

/// Which limit applies to the size-m scheme at Hurst index H.
enum class LimitRegime {
  even,          // m even, H in (1/(m+2), 1)
  odd_small_h,   // m odd,  H in (1/(m+2), 1/2)
  odd_half,      // m odd,  H = 1/2 (limit in law)
  odd_large_h,   // m odd,  H in (1/2, 1)
};

const char* to_string(LimitRegime regime) noexcept;

/// Throws RegimeError when H is outside (1/(m+2), 1) or m outside [0, 12].
LimitRegime classify_limit_regime(int m, double hurst);

/// Exponent r such that n^r (X^_1 - X_1) has a nondegenerate limit.
double rate_exponent(int m, double hurst);

struct LimitEvaluation {
  LimitRegime regime = LimitRegime::even;
  double value = 0.0;
  std::uint64_t path_seed = 0;
};

class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Limit functionals of the scaled endpoint error for one coefficient and
/// scheme size. Time integrals are left Riemann sums on the path's own grid;
/// the space integral of the large-H case uses adaptive Gauss-Kronrod.
///
/// The `x_path` arguments carry X_{l/n} = phi(x0, B_{l/n}) on the path grid
/// (as returned by FlowSolver::path), so callers that already hold the exact
/// solution do not pay for it twice.
class LimitEvaluator {
 public:
  LimitEvaluator(Coefficient coefficient, int m, FlowTolerance tolerance = {});

  int size() const noexcept { return m_; }
  const FlowSolver& flow() const noexcept { return flow_; }

  /// mu_{m+2} sigma(X_1) int_0^1 h_m(X_s) ds
  double even(const FbmPath& path, std::span<const double> x_path) const;
  /// mu_{m+3} sigma(X_1) int_0^1 (g_m - sigma h_m' / 2)(X_s) ds
  double odd_small_h(const FbmPath& path, std::span<const double> x_path) const;
  /// mu_{m+3} sigma(X_1) int_0^{B_1} h_m(phi(x0, y)) dy
  double odd_large_h(double x0, const FbmPath& path, std::span<const double> x_path) const;
  /// sigma(X_1) ( int h_m(X) [sqrt(mu_{2m+4} - mu_{m+3}^2) dW + mu_{m+3} dB] + mu_{m+3} int g_m(X) ds )
  /// with W drawn from `wseed` on the same grid.
  double half_sample(const FbmPath& path, std::span<const double> x_path,
                     std::uint64_t wseed) const;
  /// E[half_sample | B]: the dW term dropped.
  double half_conditional_mean(const FbmPath& path, std::span<const double> x_path) const;

  /// Dispatches on the regime of (m, path.hurst).
  LimitEvaluation evaluate(double x0, const FbmPath& path, std::span<const double> x_path,
                           std::uint64_t wseed) const;

  const CompiledExpression& h() const noexcept { return h_; }
  const CompiledExpression& g() const noexcept { return g_; }
  /// g_m - sigma h_m' / 2
  const CompiledExpression& small_h_integrand() const noexcept { return small_h_integrand_; }

 private:
  void require(LimitRegime wanted, double hurst, const char* operation) const;
  double riemann(const CompiledExpression& f, std::span<const double> x_path, int n) const;

  int m_;
  FlowSolver flow_;
  CompiledExpression sigma_;
  CompiledExpression h_;
  CompiledExpression g_;
  CompiledExpression small_h_integrand_;
};

/// Expression for g_m - sigma h_m' / 2.
Expression small_h_integrand_expression(const Coefficient& c, int m);

double limit_even(const Coefficient& c, int m, double x0, const FbmPath& path);
double limit_odd_small_h(const Coefficient& c, int m, double x0, const FbmPath& path);
double limit_odd_large_h(const Coefficient& c, int m, double x0, const FbmPath& path);
double limit_half_sample(const Coefficient& c, int m, double x0, const FbmPath& path,
                         std::uint64_t wseed);

}  // namespace fsde
