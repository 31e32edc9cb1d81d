#pragma once

#include <memory>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "fsde/coefficient.hpp"
#include "fsde/fbm.hpp"
#include "fsde/flow.hpp"

namespace fsde {

enum class SchemeKind { milstein_type, crank_nicholson };

const char* to_string(SchemeKind kind) noexcept;
SchemeKind parse_scheme_kind(std::string_view text);

struct SchemeSpec {
  SchemeKind kind = SchemeKind::milstein_type;
  /// Number of correction terms beyond Euler (milstein_type only).
  int size = 0;
  double fixed_point_tolerance = 1e-13;  // crank_nicholson only
  int max_iterations = 200;              // crank_nicholson only

  /// Throws std::invalid_argument when a field is out of range.
  void validate() const;

  static SchemeSpec milstein(int m) { return {SchemeKind::milstein_type, m}; }
  static SchemeSpec crank_nicholson_scheme() { return {SchemeKind::crank_nicholson, 0}; }
};

/// A scheme trajectory next to the exact solution on the same driving path.
struct SchemeRun {
  SchemeSpec spec;
  FbmPath path;
  double x0 = 0.0;
  std::vector<double> approx;
  std::vector<double> exact;
  double endpoint_error = 0.0;  // approx(1) - exact(1)
  double sup_error = 0.0;       // max_l |approx - exact|
  double max_implicit_residual = 0.0;

  int n() const noexcept { return path.n(); }
};

/// Scheme iteration failed (overflow, non-contraction, no convergence).
class SchemeError : public std::runtime_error {
 public:
  SchemeError(const std::string& message, int step);
  int step() const noexcept { return step_; }

 private:
  int step_;
};

/// Scheme plus exact-solution machinery for one coefficient, reusable across
/// many paths. Immutable and safe to share between threads.
class SchemeRunner {
 public:
  SchemeRunner(Coefficient coefficient, SchemeSpec spec, FlowTolerance tolerance = {});

  SchemeRun run(double x0, const FbmPath& path) const;

  /// Scheme values only, no exact solution. `max_residual` receives the
  /// largest implicit residual for Crank-Nicholson.
  std::vector<double> approximate(double x0, const FbmPath& path,
                                  double* max_residual = nullptr) const;

  /// One explicit Milstein-type update from state x with increment dB.
  double milstein_step(double x, double increment) const;

  const SchemeSpec& spec() const noexcept { return spec_; }
  const FlowSolver& flow() const noexcept { return flow_; }
  const Coefficient& coefficient() const noexcept { return flow_.coefficient(); }

 private:
  double crank_nicholson_step(double x, double increment, int step, double& residual) const;

  SchemeSpec spec_;
  FlowSolver flow_;
  /// terms_[j] evaluates D^j sigma / (j+1)!
  std::vector<CompiledExpression> terms_;
  double lipschitz_ = 0.0;  // max |sigma'| on the probe grid
};

SchemeRun run_milstein_type(const Coefficient& c, const SchemeSpec& spec, double x0,
                            const FbmPath& path);
SchemeRun run_crank_nicholson(const Coefficient& c, const SchemeSpec& spec, double x0,
                              const FbmPath& path);

/// n^exponent * (X^_1 - X_1).
double endpoint_scaled_error(const SchemeRun& run, double exponent);

}  // namespace fsde
