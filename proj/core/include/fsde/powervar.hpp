#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "fsde/expr.hpp"
#include "fsde/fbm.hpp"
#include "fsde/flow.hpp"

namespace fsde {

/// E[G^k] for G ~ N(0, 1): 0 for odd k, (k-1)!! for even k. Exact for k <= 34.
std::uint64_t gaussian_moment(int k);

/// Even Gaussian moments mu_{2n} = (2n-1)!! up to a maximum degree.
class MomentTable {
 public:
  explicit MomentTable(int max_degree);

  std::uint64_t operator[](int k) const;
  int max_degree() const noexcept { return max_degree_; }

 private:
  int max_degree_;
  std::vector<std::uint64_t> moments_;
};

/// Probabilists' Hermite polynomials H_0 = 1, H_1 = x,
/// H_{q+1} = x H_q - q H_{q-1}, with exact integer coefficients.
class HermiteBasis {
 public:
  explicit HermiteBasis(int max_degree);

  int max_degree() const noexcept { return static_cast<int>(table_.size()) - 1; }
  /// Monomial coefficients of H_q, index = power of x.
  const std::vector<std::int64_t>& coefficients(int q) const;
  /// H_q(x) by the three-term recurrence.
  static double evaluate(int q, double x);

 private:
  std::vector<std::vector<std::int64_t>> table_;
};

/// Coefficients a_{kappa,2q+1}, q = 1..(kappa-1)/2, with
/// x^kappa - mu_{kappa+1} x = sum_q a_{kappa,2q+1} H_{2q+1}(x).
struct OddMonomialExpansion {
  int kappa = 3;
  /// (degree 2q+1, coefficient) pairs, ascending degree.
  std::vector<std::pair<int, std::int64_t>> terms;

  std::int64_t coefficient(int degree) const;
};

/// Exact expansion; throws std::invalid_argument unless kappa is odd and >= 3.
OddMonomialExpansion hermite_expand_odd_monomial(int kappa);

/// Sum_{l<n} w_l (B_{(l+1)/n} - B_{l/n})^kappa with weights w_l = h(points[l]).
double weighted_power_variation(const CompiledExpression& h, std::span<const double> points,
                                const FbmPath& path, int kappa);
/// Weights evaluated at B_{l/n}.
double weighted_power_variation(const Expression& h, const FbmPath& path, int kappa);
/// Weights evaluated at X_{l/n} = phi(x0, B_{l/n}).
double weighted_power_variation(const Expression& h, const FlowSolver& flow, double x0,
                                const FbmPath& path, int kappa);

/// The four scaling regimes of weighted power variations of fBm.
enum class PowerRegime {
  even,            // kappa even, any H:        n^{kappa H - 1}
  odd_rough,       // kappa odd, H < 1/2:       n^{(kappa+1) H - 1}
  odd_brownian,    // kappa odd, H = 1/2:       n^{(kappa-1)/2}
  odd_smooth,      // kappa odd, H > 1/2:       n^{(kappa-1) H}
};

const char* to_string(PowerRegime regime) noexcept;

/// |H - 1/2| below this counts as the Brownian case.
inline constexpr double kHalfTolerance = 1e-12;

PowerRegime classify_power_regime(int kappa, double hurst);
/// Exponent r of the regime's normalisation n^r.
double power_variation_exponent(int kappa, double hurst);

class RegimeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// raw * n^r for the regime implied by (kappa, H). When `expected` is given
/// and differs from the implied regime, throws RegimeError.
double scaled_variation(double raw, int n, int kappa, double hurst);
double scaled_variation(double raw, int n, int kappa, double hurst, PowerRegime expected);

/// Limit of the scaled variation with weights at B_{l/n}:
///   even         mu_kappa int_0^1 h(B_s) ds
///   odd_rough    -(mu_{kappa+1} / 2) int_0^1 h'(B_s) ds
///   odd_brownian int_0^1 h(B_s) (sqrt(mu_{2 kappa} - mu_{kappa+1}^2) dW_s + mu_{kappa+1} dB_s),
///                W from wseed
///   odd_smooth   mu_{kappa+1} int_0^{B_1} h(u) du
/// Time integrals are left Riemann / forward sums on the path grid.
double power_variation_limit(const Expression& h, const FbmPath& path, int kappa,
                             std::uint64_t wseed = 0);

/// S_k^{(q)} = sum_{j<k} f(points[j]) H_q(n^H dB_{j/n}).
double s_statistic(const CompiledExpression& f, std::span<const double> points,
                   const FbmPath& path, int q, int k);

}  // namespace fsde
