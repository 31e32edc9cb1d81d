#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "fsde/coefficient.hpp"
#include "fsde/fbm.hpp"

namespace fsde {

struct FlowTolerance {
  double absolute = 1e-12;
  double relative = 1e-12;
};

class FlowError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The flow phi(x, y) of d phi / dy = sigma(phi), phi(x, 0) = x, so that the
/// exact solution of dX = sigma(X) dB is X_t = phi(x, B_t).
///
/// Integrated with the embedded Runge-Kutta-Fehlberg 7(8) pair under
/// step-size control. Negative y integrates the reversed field -sigma over
/// [0, |y|]. Immutable; evaluations are pure.
class FlowSolver {
 public:
  explicit FlowSolver(Coefficient coefficient, FlowTolerance tolerance = {});

  double eval(double x, double y) const;

  /// X_{l/n} = phi(x, B_{l/n}), advanced increment by increment through the
  /// group property phi(phi(x, a), b) = phi(x, a + b).
  std::vector<double> path(double x, const FbmPath& p) const;
  void path(double x, std::span<const double> driver, std::span<double> out) const;

  /// x + sum_{j=0}^{m+2} D^j sigma(x) y^{j+1} / (j+1)!
  double taylor(double x, double y, int m) const;

  struct Verified {
    double value;       // at the configured tolerance
    double refined;     // at tolerance / 1000
    double discrepancy; // |value - refined|
  };
  /// Re-solves with tightened tolerances and reports the difference.
  Verified eval_verified(double x, double y) const;

  const Coefficient& coefficient() const noexcept { return coefficient_; }
  const FlowTolerance& tolerance() const noexcept { return tolerance_; }

 private:
  double integrate(double x, double y, const FlowTolerance& tol) const;

  Coefficient coefficient_;
  FlowTolerance tolerance_;
  double constant_value_ = 0.0;
};

}  // namespace fsde
