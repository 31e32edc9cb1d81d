#include "fsde/flow.hpp"

#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <sstream>

namespace fsde {

namespace odeint = boost::numeric::odeint;

namespace {

using Stepper = odeint::runge_kutta_fehlberg78<double, double, double, double,
                                               odeint::vector_space_algebra>;

std::string describe(double x, double y) {
  std::ostringstream os;
  os.precision(17);
  os << "phi(x = " << x << ", y = " << y << ")";
  return os.str();
}

}  // namespace

FlowSolver::FlowSolver(Coefficient coefficient, FlowTolerance tolerance)
    : coefficient_(std::move(coefficient)), tolerance_(tolerance) {
  if (!(tolerance.absolute > 0.0) || !(tolerance.relative > 0.0)) {
    throw std::invalid_argument("FlowSolver: tolerances must be positive");
  }
  coefficient_.require_elliptic("FlowSolver");
  if (coefficient_.is_constant()) constant_value_ = coefficient_.sigma().value();
}

double FlowSolver::integrate(double x, double y, const FlowTolerance& tol) const {
  if (y == 0.0) return x;
  if (coefficient_.is_constant()) return x + constant_value_ * y;

  const CompiledExpression& sigma = coefficient_.compiled_sigma();
  const double direction = y > 0.0 ? 1.0 : -1.0;
  auto rhs = [&sigma, direction](const double& state, double& dstate, double) {
    dstate = direction * sigma(state);
  };
  const double length = std::abs(y);
  double state = x;
  try {
    odeint::integrate_adaptive(odeint::make_controlled(tol.absolute, tol.relative, Stepper()),
                               rhs, state, 0.0, length, length);
  } catch (const std::exception& e) {
    throw FlowError(describe(x, y) + ": step-size control failed (" + e.what() + ")");
  }
  if (!std::isfinite(state)) throw FlowError(describe(x, y) + ": non-finite state");
  return state;
}

double FlowSolver::eval(double x, double y) const { return integrate(x, y, tolerance_); }

FlowSolver::Verified FlowSolver::eval_verified(double x, double y) const {
  const double value = integrate(x, y, tolerance_);
  const FlowTolerance tight{tolerance_.absolute * 1e-3, tolerance_.relative * 1e-3};
  const double refined = integrate(x, y, tight);
  return {value, refined, std::abs(value - refined)};
}

void FlowSolver::path(double x, std::span<const double> driver, std::span<double> out) const {
  if (driver.size() != out.size() || driver.empty()) {
    throw std::invalid_argument("FlowSolver::path: size mismatch");
  }
  // X at the first node is phi(x, B_0); B_0 = 0 on every sampled path.
  double state = integrate(x, driver[0], tolerance_);
  out[0] = state;
  for (std::size_t l = 1; l < driver.size(); ++l) {
    state = integrate(state, driver[l] - driver[l - 1], tolerance_);
    out[l] = state;
  }
}

std::vector<double> FlowSolver::path(double x, const FbmPath& p) const {
  std::vector<double> out(p.values.size());
  path(x, p.values, out);
  return out;
}

double FlowSolver::taylor(double x, double y, int m) const {
  if (m < 0) throw std::invalid_argument("FlowSolver::taylor: negative m");
  double result = x;
  double power = 1.0;
  Expression term = coefficient_.sigma();
  for (int j = 0; j <= m + 2; ++j) {
    power *= y;
    if (j > 0) term = differentiate(term) * coefficient_.sigma();
    result += term.evaluate(x) * power / static_cast<double>(factorial(j + 1));
  }
  return result;
}

}  // namespace fsde
