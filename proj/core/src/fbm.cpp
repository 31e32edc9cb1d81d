#include "fsde/fbm.hpp"

#include <fftw3.h>

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <mutex>
#include <ostream>
#include <string>

#include "fsde/rng.hpp"

namespace fsde {

const char* to_string(SamplingMethod method) noexcept {
  switch (method) {
    case SamplingMethod::circulant: return "circulant";
    case SamplingMethod::cholesky: return "cholesky";
    case SamplingMethod::automatic: return "auto";
  }
  return "?";
}

SamplingMethod parse_sampling_method(std::string_view text) {
  if (text == "circulant") return SamplingMethod::circulant;
  if (text == "cholesky") return SamplingMethod::cholesky;
  if (text == "auto" || text == "automatic") return SamplingMethod::automatic;
  throw std::invalid_argument("unknown sampling method '" + std::string(text) +
                              "' (expected circulant, cholesky or auto)");
}

FbmPath FbmPath::from_values(double hurst, std::vector<double> values, std::uint64_t seed) {
  if (values.size() < 2) throw std::invalid_argument("FbmPath: need at least two grid values");
  FbmPath p;
  p.hurst = hurst;
  p.values = std::move(values);
  p.seed = seed;
  return p;
}

namespace {

void check_hurst(double hurst) {
  if (!(hurst > 0.0 && hurst < 1.0)) {
    throw std::invalid_argument("Hurst index must lie in (0, 1), got " + std::to_string(hurst));
  }
}

// FFTW's planner is not thread-safe; execution of an existing plan is.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwBuffer {
  explicit FftwBuffer(std::size_t n)
      : data(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n))) {
    if (data == nullptr) throw std::bad_alloc();
  }
  ~FftwBuffer() { fftw_free(data); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;

  fftw_complex* data;
};

}  // namespace

double fbm_covariance(double hurst, double s, double t) {
  check_hurst(hurst);
  const double h2 = 2.0 * hurst;
  return 0.5 * (std::pow(s, h2) + std::pow(t, h2) - std::pow(std::abs(t - s), h2));
}

double fgn_autocovariance(double hurst, long k) {
  const double h2 = 2.0 * hurst;
  const double a = std::abs(static_cast<double>(k));
  return 0.5 * (std::pow(a + 1.0, h2) - 2.0 * std::pow(a, h2) + std::pow(std::abs(a - 1.0), h2));
}

struct FbmSampler::Impl {
  double hurst = 0.5;
  int n = 1;
  SamplingMethod method = SamplingMethod::circulant;
  double scale = 1.0;  // n^{-H}

  // circulant embedding
  std::vector<double> sqrt_weights;  // sqrt(lambda_k / M) or sqrt(lambda_k / 2M)
  fftw_plan plan = nullptr;
  double min_relative_eigenvalue = 0.0;

  // cholesky
  Eigen::MatrixXd lower;

  ~Impl() {
    if (plan != nullptr) {
      std::lock_guard lock(fftw_planner_mutex());
      fftw_destroy_plan(plan);
    }
  }

  bool setup_circulant() {
    const std::size_t m = 2 * static_cast<std::size_t>(n);
    FftwBuffer in(m);
    FftwBuffer out(m);
    {
      std::lock_guard lock(fftw_planner_mutex());
      plan = fftw_plan_dft_1d(static_cast<int>(m), in.data, out.data, FFTW_FORWARD,
                              FFTW_ESTIMATE);
    }
    if (plan == nullptr) throw SamplingError("FFTW failed to create a plan");
    for (std::size_t j = 0; j < m; ++j) {
      const long lag = j <= static_cast<std::size_t>(n) ? static_cast<long>(j)
                                                        : static_cast<long>(m - j);
      in.data[j][0] = fgn_autocovariance(hurst, lag);
      in.data[j][1] = 0.0;
    }
    fftw_execute_dft(plan, in.data, out.data);

    double max_lambda = 0.0;
    double min_lambda = out.data[0][0];
    for (std::size_t k = 0; k < m; ++k) {
      max_lambda = std::max(max_lambda, out.data[k][0]);
      min_lambda = std::min(min_lambda, out.data[k][0]);
    }
    min_relative_eigenvalue = min_lambda / max_lambda;
    if (min_relative_eigenvalue < -1e-10) return false;

    sqrt_weights.resize(n + 1);
    const double md = static_cast<double>(m);
    for (int k = 0; k <= n; ++k) {
      const double lambda = std::max(out.data[k][0], 0.0);
      const bool real_mode = k == 0 || k == n;
      sqrt_weights[k] = std::sqrt(lambda / (real_mode ? md : 2.0 * md));
    }
    return true;
  }

  void setup_cholesky() {
    Eigen::MatrixXd cov(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) cov(i, j) = fgn_autocovariance(hurst, i - j);
    }
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success) {
      throw SamplingError("Cholesky factorisation of the fGn covariance failed");
    }
    lower = llt.matrixL();
  }

  void increments_circulant(NormalStream& normal, std::vector<double>& inc) const {
    const std::size_t m = 2 * static_cast<std::size_t>(n);
    FftwBuffer w(m);
    FftwBuffer out(m);
    w.data[0][0] = sqrt_weights[0] * normal();
    w.data[0][1] = 0.0;
    w.data[n][0] = sqrt_weights[n] * normal();
    w.data[n][1] = 0.0;
    for (int k = 1; k < n; ++k) {
      const double re = sqrt_weights[k] * normal();
      const double im = sqrt_weights[k] * normal();
      w.data[k][0] = re;
      w.data[k][1] = im;
      w.data[m - k][0] = re;
      w.data[m - k][1] = -im;
    }
    fftw_execute_dft(plan, w.data, out.data);
    for (int l = 0; l < n; ++l) inc[l] = out.data[l][0] * scale;
  }

  void increments_cholesky(NormalStream& normal, std::vector<double>& inc) const {
    Eigen::VectorXd z(n);
    for (int i = 0; i < n; ++i) z(i) = normal();
    const Eigen::VectorXd x = lower.triangularView<Eigen::Lower>() * z;
    for (int l = 0; l < n; ++l) inc[l] = x(l) * scale;
  }
};

FbmSampler::FbmSampler(double hurst, int n, SamplingMethod method, bool allow_large_cholesky) {
  check_hurst(hurst);
  if (n < 1) throw std::invalid_argument("FbmSampler: n must be >= 1");
  auto impl = std::make_shared<Impl>();
  impl->hurst = hurst;
  impl->n = n;
  impl->scale = std::pow(static_cast<double>(n), -hurst);

  auto use_cholesky = [&] {
    if (n > kCholeskyDefaultLimit && !allow_large_cholesky) {
      throw SamplingError("Cholesky sampler limited to n <= " +
                          std::to_string(kCholeskyDefaultLimit) + " (got n = " +
                          std::to_string(n) + "); pass allow_large_cholesky to override");
    }
    impl->method = SamplingMethod::cholesky;
    impl->setup_cholesky();
  };

  switch (method) {
    case SamplingMethod::cholesky: use_cholesky(); break;
    case SamplingMethod::circulant:
      impl->method = SamplingMethod::circulant;
      if (!impl->setup_circulant()) {
        throw SamplingError("circulant embedding has a negative eigenvalue (relative " +
                            std::to_string(impl->min_relative_eigenvalue) + ")");
      }
      break;
    case SamplingMethod::automatic:
      impl->method = SamplingMethod::circulant;
      if (!impl->setup_circulant()) use_cholesky();
      break;
  }
  impl_ = std::move(impl);
}

FbmSampler::~FbmSampler() = default;
FbmSampler::FbmSampler(const FbmSampler&) = default;
FbmSampler& FbmSampler::operator=(const FbmSampler&) = default;
FbmSampler::FbmSampler(FbmSampler&&) noexcept = default;
FbmSampler& FbmSampler::operator=(FbmSampler&&) noexcept = default;

FbmPath FbmSampler::sample(std::uint64_t seed) const {
  const Impl& impl = *impl_;
  NormalStream normal(seed);
  std::vector<double> inc(impl.n);
  if (impl.method == SamplingMethod::circulant) {
    impl.increments_circulant(normal, inc);
  } else {
    impl.increments_cholesky(normal, inc);
  }
  FbmPath path;
  path.hurst = impl.hurst;
  path.seed = seed;
  path.method = impl.method;
  path.values.resize(impl.n + 1);
  path.values[0] = 0.0;
  double b = 0.0;
  for (int l = 0; l < impl.n; ++l) {
    b += inc[l];
    path.values[l + 1] = b;
  }
  return path;
}

double FbmSampler::hurst() const noexcept { return impl_->hurst; }
int FbmSampler::n() const noexcept { return impl_->n; }
SamplingMethod FbmSampler::method() const noexcept { return impl_->method; }
double FbmSampler::min_relative_eigenvalue() const noexcept {
  return impl_->min_relative_eigenvalue;
}

FbmPath sample_path(double hurst, int n, std::uint64_t seed, SamplingMethod method) {
  return FbmSampler(hurst, n, method).sample(seed);
}

double max_increment(const FbmPath& path) {
  double best = 0.0;
  for (int l = 0; l < path.n(); ++l) best = std::max(best, std::abs(path.increment(l)));
  return best;
}

void write_path_csv(std::ostream& out, const FbmPath& path) {
  out << "t,B\n";
  char buf[64];
  const Grid grid = path.grid();
  for (int l = 0; l <= path.n(); ++l) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", grid.time(l), path.values[l]);
    out << buf;
  }
}

}  // namespace fsde
