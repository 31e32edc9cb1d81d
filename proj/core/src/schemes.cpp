#include "fsde/schemes.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace fsde {

const char* to_string(SchemeKind kind) noexcept {
  switch (kind) {
    case SchemeKind::milstein_type: return "milstein_type";
    case SchemeKind::crank_nicholson: return "crank_nicholson";
  }
  return "?";
}

SchemeKind parse_scheme_kind(std::string_view text) {
  if (text == "milstein_type" || text == "milstein") return SchemeKind::milstein_type;
  if (text == "crank_nicholson") return SchemeKind::crank_nicholson;
  throw std::invalid_argument("unknown scheme '" + std::string(text) +
                              "' (expected milstein_type or crank_nicholson)");
}

void SchemeSpec::validate() const {
  if (kind == SchemeKind::milstein_type && (size < 0 || size > kMaxSchemeSize)) {
    throw std::invalid_argument("scheme size m must lie in [0, " + std::to_string(kMaxSchemeSize) +
                                "], got " + std::to_string(size));
  }
  if (!(fixed_point_tolerance > 0.0)) {
    throw std::invalid_argument("fixed-point tolerance must be positive");
  }
  if (max_iterations < 1) throw std::invalid_argument("fixed-point max iterations must be >= 1");
}

SchemeError::SchemeError(const std::string& message, int step)
    : std::runtime_error(message + " (step " + std::to_string(step) + ")"), step_(step) {}

SchemeRunner::SchemeRunner(Coefficient coefficient, SchemeSpec spec, FlowTolerance tolerance)
    : spec_(spec), flow_(std::move(coefficient), tolerance) {
  spec_.validate();
  const Coefficient& c = flow_.coefficient();
  if (spec_.kind == SchemeKind::milstein_type) {
    Expression d = c.sigma();
    for (int j = 0; j <= spec_.size; ++j) {
      if (j > 0) d = differentiate(d) * c.sigma();
      terms_.emplace_back((1.0 / static_cast<double>(factorial(j + 1))) * d);
    }
  } else {
    lipschitz_ = c.max_abs_derivative(1);
  }
}

double SchemeRunner::milstein_step(double x, double increment) const {
  // Horner form of sum_j D^j sigma(x) / (j+1)! * dB^{j+1}.
  double acc = 0.0;
  for (std::size_t j = terms_.size(); j-- > 0;) acc = acc * increment + terms_[j](x);
  return x + acc * increment;
}

double SchemeRunner::crank_nicholson_step(double x, double increment, int step,
                                          double& residual) const {
  const CompiledExpression& sigma = flow_.coefficient().compiled_sigma();
  const double sx = sigma(x);
  const double half = 0.5 * increment;
  double y = x + sx * increment;  // explicit Euler predictor
  for (int it = 0; it < spec_.max_iterations; ++it) {
    const double next = x + half * (sx + sigma(y));
    const double change = std::abs(next - y);
    y = next;
    if (change < spec_.fixed_point_tolerance) {
      residual = std::abs(y - x - half * (sx + sigma(y)));
      return y;
    }
  }
  throw SchemeError("Crank-Nicholson fixed point did not converge within " +
                        std::to_string(spec_.max_iterations) + " iterations",
                    step);
}

std::vector<double> SchemeRunner::approximate(double x0, const FbmPath& path,
                                              double* max_residual) const {
  const int n = path.n();
  std::vector<double> approx(n + 1);
  approx[0] = x0;
  double worst_residual = 0.0;

  if (spec_.kind == SchemeKind::crank_nicholson) {
    const double contraction = 0.5 * lipschitz_ * max_increment(path);
    if (!(contraction < 1.0)) {
      throw SchemeError("Crank-Nicholson fixed point is not a contraction: |sigma'|_inf * Delta_n / 2 = " +
                            std::to_string(contraction),
                        0);
    }
  }

  double x = x0;
  for (int l = 0; l < n; ++l) {
    const double db = path.increment(l);
    if (spec_.kind == SchemeKind::milstein_type) {
      x = milstein_step(x, db);
    } else {
      double residual = 0.0;
      x = crank_nicholson_step(x, db, l, residual);
      worst_residual = std::max(worst_residual, residual);
    }
    if (!std::isfinite(x)) throw SchemeError("scheme state is not finite", l + 1);
    approx[l + 1] = x;
  }
  if (max_residual != nullptr) *max_residual = worst_residual;
  return approx;
}

SchemeRun SchemeRunner::run(double x0, const FbmPath& path) const {
  SchemeRun r;
  r.spec = spec_;
  r.path = path;
  r.x0 = x0;
  r.approx = approximate(x0, path, &r.max_implicit_residual);
  r.exact = flow_.path(x0, path);
  r.endpoint_error = r.approx.back() - r.exact.back();
  for (std::size_t l = 0; l < r.approx.size(); ++l) {
    r.sup_error = std::max(r.sup_error, std::abs(r.approx[l] - r.exact[l]));
  }
  return r;
}

SchemeRun run_milstein_type(const Coefficient& c, const SchemeSpec& spec, double x0,
                            const FbmPath& path) {
  if (spec.kind != SchemeKind::milstein_type) {
    throw std::invalid_argument("run_milstein_type: spec is not milstein_type");
  }
  return SchemeRunner(c, spec).run(x0, path);
}

SchemeRun run_crank_nicholson(const Coefficient& c, const SchemeSpec& spec, double x0,
                              const FbmPath& path) {
  if (spec.kind != SchemeKind::crank_nicholson) {
    throw std::invalid_argument("run_crank_nicholson: spec is not crank_nicholson");
  }
  return SchemeRunner(c, spec).run(x0, path);
}

double endpoint_scaled_error(const SchemeRun& run, double exponent) {
  return std::pow(static_cast<double>(run.n()), exponent) * run.endpoint_error;
}

}  // namespace fsde
