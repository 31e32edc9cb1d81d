#include <cmath>
#include <string>

#include "doctest.h"
#include "fsde/limits.hpp"
#include "fsde/rng.hpp"
#include "oracles.hpp"

using namespace fsde;

namespace {

const Coefficient& reference() {
  static const Coefficient c = Coefficient::parse("2 + sin(x)");
  return c;
}

// Affine sigma, elliptic on the default probe interval [-20, 20].
const double kSlope = 0.01;
const Coefficient& affine() {
  static const Coefficient c = Coefficient::parse("0.01*x + 1");
  return c;
}

}  // namespace

TEST_CASE("regime classification and rate exponents") {
  CHECK(classify_limit_regime(0, 0.7) == LimitRegime::even);
  CHECK(classify_limit_regime(2, 0.3) == LimitRegime::even);
  CHECK(classify_limit_regime(1, 0.45) == LimitRegime::odd_small_h);
  CHECK(classify_limit_regime(1, 0.5) == LimitRegime::odd_half);
  CHECK(classify_limit_regime(1, 0.7) == LimitRegime::odd_large_h);
  CHECK(rate_exponent(0, 0.7) == doctest::Approx(0.4));
  CHECK(rate_exponent(2, 0.35) == doctest::Approx(0.4));
  CHECK(rate_exponent(1, 0.45) == doctest::Approx(0.8));
  CHECK(rate_exponent(1, 0.5) == doctest::Approx(1.0));
  CHECK(rate_exponent(1, 0.7) == doctest::Approx(1.4));
  CHECK(rate_exponent(3, 0.5) == doctest::Approx(2.0));
}

TEST_CASE("inadmissible H names the violated inequality") {
  try {
    (void)classify_limit_regime(1, 0.3);
    FAIL("expected RegimeError");
  } catch (const RegimeError& e) {
    CHECK(std::string(e.what()).find("1/(m+2) < H < 1") != std::string::npos);
  }
  CHECK_THROWS_AS(classify_limit_regime(0, 1.0), RegimeError);
  CHECK_THROWS_AS(classify_limit_regime(13, 0.5), RegimeError);
}

TEST_CASE("each functional rejects other regimes") {
  const FbmPath p = sample_path(0.7, 64, 1);
  CHECK_THROWS_AS(limit_even(reference(), 1, 0.0, p), RegimeError);
  CHECK_THROWS_AS(limit_odd_small_h(reference(), 1, 0.0, p), RegimeError);
  CHECK_THROWS_AS(limit_half_sample(reference(), 1, 0.0, p, 3), RegimeError);
  CHECK_THROWS_AS(limit_odd_large_h(reference(), 2, 0.0, p), RegimeError);
  const FbmPath rough = sample_path(0.45, 64, 1);
  CHECK_THROWS_AS(limit_odd_large_h(reference(), 1, 0.0, rough), RegimeError);
  try {
    (void)limit_odd_large_h(reference(), 1, 0.0, rough);
  } catch (const RegimeError& e) {
    CHECK(std::string(e.what()).find("H > 1/2") != std::string::npos);
  }
}

TEST_CASE("all functionals vanish for constant sigma") {
  const Coefficient c = Coefficient::parse("1.3");
  CHECK(limit_even(c, 0, 0.2, sample_path(0.7, 128, 4)) == 0.0);
  CHECK(limit_even(c, 2, 0.2, sample_path(0.35, 128, 4)) == 0.0);
  CHECK(limit_odd_small_h(c, 1, 0.2, sample_path(0.45, 128, 4)) == 0.0);
  CHECK(limit_odd_large_h(c, 1, 0.2, sample_path(0.7, 128, 4)) == 0.0);
  CHECK(limit_half_sample(c, 1, 0.2, sample_path(0.5, 128, 4), 9) == 0.0);
}

TEST_CASE("m = 0: -sigma(X_1)/2 times the integral of sigma'(X)") {
  const FbmPath p = sample_path(0.7, 512, 6);
  const FlowSolver flow(reference());
  const auto xs = flow.path(0.0, p);
  double riemann = 0.0;
  for (int l = 0; l < p.n(); ++l) riemann += std::cos(xs[l]);
  riemann /= p.n();
  const double expected = -(2 + std::sin(xs.back())) / 2 * riemann;
  CHECK(limit_even(reference(), 0, 0.0, p) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("engineered constant integrands") {
  const FlowSolver flow(affine());
  // h_0 = -a/2.
  const FbmPath p = sample_path(0.7, 256, 2);
  const double x1 = flow.path(0.0, p).back();
  CHECK(limit_even(affine(), 0, 0.0, p) ==
        doctest::Approx(1.0 * (kSlope * x1 + 1) * (-kSlope / 2)).epsilon(1e-12));
  // g_1 - sigma h_1' / 2 = 3 a^3 / 24.
  const FbmPath q = sample_path(0.45, 256, 2);
  const double y1 = flow.path(0.0, q).back();
  CHECK(limit_odd_small_h(affine(), 1, 0.0, q) ==
        doctest::Approx(3.0 * (kSlope * y1 + 1) * 3 * std::pow(kSlope, 3) / 24).epsilon(1e-10));
}

TEST_CASE("large-H space integral: empty interval and change of variables") {
  std::vector<double> flat(65, 0.0);
  flat[10] = 0.4;
  CHECK(limit_odd_large_h(reference(), 1, 0.0, FbmPath::from_values(0.7, flat)) == 0.0);

  // Synthetic path with B_1 = 1. With u = phi(x0, y), dy = du / sigma(u).
  std::vector<double> values(65);
  for (int l = 0; l <= 64; ++l) values[l] = std::sin(3.0 * l / 64) / std::sin(3.0);
  const FbmPath p = FbmPath::from_values(0.7, values);
  const FlowSolver flow(reference());
  const double x1 = flow.eval(0.0, 1.0);
  const Expression h = h_function(reference(), 1);
  const double integral = oracle::simpson(
      [&](double u) { return h.evaluate(u) / (2 + std::sin(u)); }, 0.0, x1, 4000);
  const double expected = 3.0 * (2 + std::sin(x1)) * integral;
  CHECK(std::abs(limit_odd_large_h(reference(), 1, 0.0, p) - expected) < 1e-9);

  // Negative B_1 gives a signed integral.
  for (auto& v : values) v = -v;
  const FbmPath neg = FbmPath::from_values(0.7, values);
  const double xm = flow.eval(0.0, -1.0);
  const double integral_neg = oracle::simpson(
      [&](double u) { return h.evaluate(u) / (2 + std::sin(u)); }, 0.0, xm, 4000);
  CHECK(std::abs(limit_odd_large_h(reference(), 1, 0.0, neg) - 3.0 * (2 + std::sin(xm)) * integral_neg) < 1e-9);
}

TEST_CASE("half regime: W-average equals the conditional mean") {
  const LimitEvaluator ev(reference(), 1);
  const FbmPath p = sample_path(0.5, 256, 13);
  const auto xs = ev.flow().path(0.0, p);
  std::vector<double> draws;
  for (int i = 0; i < 1000; ++i) draws.push_back(ev.half_sample(p, xs, derive_seed(77, 0, i)));
  const double target = ev.half_conditional_mean(p, xs);
  CHECK(std::abs(oracle::mean(draws) - target) < 4 * oracle::sem(draws));

  // Conditional mean written out: sigma(X_1) mu_4 (Ito sum of h_1 dB + Riemann sum of g_1).
  const Expression h1 = h_function(reference(), 1);
  const Expression g1 = g_function(reference(), 1);
  double ito = 0.0, riemann = 0.0;
  for (int l = 0; l < p.n(); ++l) {
    ito += h1.evaluate(xs[l]) * p.increment(l);
    riemann += g1.evaluate(xs[l]) / p.n();
  }
  CHECK(target == doctest::Approx((2 + std::sin(xs.back())) * 3.0 * (ito + riemann)).epsilon(1e-12));
}

TEST_CASE("half regime with affine sigma") {
  // h_1 = -a^2/6 and g_1 = a^3/8, both constant.
  const LimitEvaluator ev(affine(), 1);
  const FbmPath p = sample_path(0.5, 128, 21);
  const auto xs = ev.flow().path(0.0, p);
  const double s1 = kSlope * xs.back() + 1;
  const double a = kSlope;
  CHECK(ev.half_conditional_mean(p, xs) ==
        doctest::Approx(s1 * (3.0 * (-a * a / 6) * p.endpoint() + 3.0 * a * a * a / 8)).epsilon(1e-10));
}

TEST_CASE("half regime: conditional variance given B") {
  // Affine sigma: h_1 = -a^2/6, so given B the draw is normal with variance
  // sigma(X_1)^2 (mu_6 - mu_4^2) h_1^2.
  const LimitEvaluator ev(affine(), 1);
  const FbmPath p = sample_path(0.5, 128, 22);
  const auto xs = ev.flow().path(0.0, p);
  const double s1 = kSlope * xs.back() + 1;
  const double h1 = -kSlope * kSlope / 6;
  const double expected = s1 * s1 * 6.0 * h1 * h1;
  std::vector<double> draws;
  for (int i = 0; i < 4000; ++i) draws.push_back(ev.half_sample(p, xs, derive_seed(78, 0, i)));
  const double m = oracle::mean(draws);
  double ss = 0.0;
  for (double d : draws) ss += (d - m) * (d - m);
  const double var = ss / (draws.size() - 1);
  CHECK(std::abs(var / expected - 1.0) < 4 * std::sqrt(2.0 / 4000));
}

TEST_CASE("Riemann functionals are invariant under a step-function refinement") {
  const FbmPath p = sample_path(0.7, 128, 40);
  const LimitEvaluator even0(reference(), 0);
  const auto xs = even0.flow().path(0.0, p);
  std::vector<double> b2, x2;
  for (int l = 0; l < p.n(); ++l) {
    b2.insert(b2.end(), {p.values[l], p.values[l]});
    x2.insert(x2.end(), {xs[l], xs[l]});
  }
  b2.push_back(p.values.back());
  x2.push_back(xs.back());
  const FbmPath fine = FbmPath::from_values(0.7, b2);
  CHECK(std::abs(even0.even(p, xs) - even0.even(fine, x2)) < 1e-12);

  FbmPath rough = p;
  rough.hurst = 0.45;
  FbmPath rough_fine = fine;
  rough_fine.hurst = 0.45;
  const LimitEvaluator small(reference(), 1);
  CHECK(std::abs(small.odd_small_h(rough, xs) - small.odd_small_h(rough_fine, x2)) < 1e-12);
}

TEST_CASE("dispatch records the path seed") {
  const LimitEvaluator ev(reference(), 1);
  const FbmPath p = sample_path(0.7, 64, 1234);
  const auto xs = ev.flow().path(0.0, p);
  const LimitEvaluation e = ev.evaluate(0.0, p, xs, 5);
  CHECK(e.regime == LimitRegime::odd_large_h);
  CHECK(e.path_seed == 1234);
  CHECK(e.value == ev.odd_large_h(0.0, p, xs));
}
