#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace fsde {

enum class SamplingMethod { circulant, cholesky, automatic };

const char* to_string(SamplingMethod method) noexcept;
SamplingMethod parse_sampling_method(std::string_view text);

/// Largest n accepted by the Cholesky sampler unless explicitly overridden.
inline constexpr int kCholeskyDefaultLimit = 1 << 12;

/// Uniform grid {l/n : l = 0..n} on [0, 1].
struct Grid {
  int n = 1;

  double step() const noexcept { return 1.0 / n; }
  double time(int l) const noexcept { return static_cast<double>(l) / n; }
};

/// One fractional Brownian path sampled at l/n, l = 0..n.
struct FbmPath {
  double hurst = 0.5;
  std::vector<double> values;  // values[0] == 0, size n + 1
  std::uint64_t seed = 0;
  SamplingMethod method = SamplingMethod::circulant;

  int n() const noexcept { return static_cast<int>(values.size()) - 1; }
  Grid grid() const noexcept { return Grid{n()}; }
  double increment(int l) const noexcept { return values[l + 1] - values[l]; }
  double endpoint() const noexcept { return values.back(); }

  /// Path from explicit values (synthetic paths in tests and tools).
  static FbmPath from_values(double hurst, std::vector<double> values, std::uint64_t seed = 0);
};

/// Cov(B_s, B_t) = (s^{2H} + t^{2H} - |t - s|^{2H}) / 2.
double fbm_covariance(double hurst, double s, double t);

/// Autocovariance of unit-step fractional Gaussian noise at lag k.
double fgn_autocovariance(double hurst, long k);

class SamplingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Exact sampler for fBm on the grid {l/n}. Owns the per-(H, n) set-up
/// (circulant eigenvalues and FFT plan, or the Cholesky factor) so repeated
/// draws only pay for the random numbers and one transform. Immutable after
/// construction; `sample` may be called concurrently.
class FbmSampler {
 public:
  FbmSampler(double hurst, int n, SamplingMethod method = SamplingMethod::automatic,
             bool allow_large_cholesky = false);
  ~FbmSampler();
  FbmSampler(const FbmSampler&);
  FbmSampler& operator=(const FbmSampler&);
  FbmSampler(FbmSampler&&) noexcept;
  FbmSampler& operator=(FbmSampler&&) noexcept;

  FbmPath sample(std::uint64_t seed) const;

  double hurst() const noexcept;
  int n() const noexcept;
  /// Method in use after resolving `automatic`.
  SamplingMethod method() const noexcept;
  /// Smallest circulant eigenvalue relative to the largest (circulant only).
  double min_relative_eigenvalue() const noexcept;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

/// Convenience wrapper: builds a sampler and draws one path.
FbmPath sample_path(double hurst, int n, std::uint64_t seed,
                    SamplingMethod method = SamplingMethod::automatic);

/// max_l |B_{(l+1)/n} - B_{l/n}|.
double max_increment(const FbmPath& path);

/// CSV with header `t,B`, 17 significant digits.
void write_path_csv(std::ostream& out, const FbmPath& path);

}  // namespace fsde
