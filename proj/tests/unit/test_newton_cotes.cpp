#include <cmath>

#include "doctest.h"
#include "fsde/newton_cotes.hpp"
#include "fsde/rng.hpp"
#include "oracles.hpp"

using namespace fsde;

namespace {

// Weights from the moment equations sum_j w_j t_j^p = 1/(p+1), p = 0..2N-2,
// solved by exact Gaussian elimination.
std::vector<Rational> vandermonde_weights(int order) {
  const int k = 2 * order - 1;
  std::vector<std::vector<Rational>> a(k, std::vector<Rational>(k + 1));
  for (int p = 0; p < k; ++p) {
    for (int j = 0; j < k; ++j) {
      Rational t(j, k - 1);
      Rational power = 1;
      for (int i = 0; i < p; ++i) power *= t;
      a[p][j] = power;
    }
    a[p][k] = Rational(1, p + 1);
  }
  for (int c = 0; c < k; ++c) {
    int pivot = c;
    while (a[pivot][c] == 0) ++pivot;
    std::swap(a[c], a[pivot]);
    for (int r = 0; r < k; ++r) {
      if (r == c || a[r][c] == 0) continue;
      const Rational f = a[r][c] / a[c][c];
      for (int j = c; j <= k; ++j) a[r][j] -= f * a[c][j];
    }
  }
  std::vector<Rational> w(k);
  for (int j = 0; j < k; ++j) w[j] = a[j][k] / a[j][j];
  return w;
}

}  // namespace

TEST_CASE("low orders") {
  const NCWeights w0 = nc_weights(0);
  CHECK(w0.nodes == std::vector<Rational>{0});
  CHECK(w0.weights == std::vector<Rational>{1});
  CHECK(w0.to_string() == "0: 1");

  const NCWeights w1 = nc_weights(1);
  CHECK(w1.weights == std::vector<Rational>{Rational(1, 2), Rational(1, 2)});
  CHECK(w1.to_string() == "0: 1/2, 1: 1/2");

  const NCWeights w2 = nc_weights(2);
  CHECK(w2.nodes == std::vector<Rational>{0, Rational(1, 2), 1});
  CHECK(w2.weights == std::vector<Rational>{Rational(1, 6), Rational(2, 3), Rational(1, 6)});
  CHECK(w2.to_string() == "0: 1/6, 1/2: 2/3, 1: 1/6");
  CHECK_THROWS(nc_weights(-1));
}

TEST_CASE("Lagrange integrals agree with the moment equations") {
  for (int order = 2; order <= 7; ++order) CHECK(nc_weights(order).weights == vandermonde_weights(order));
}

TEST_CASE("weights sum to one and integrate polynomials exactly") {
  for (int order = 0; order <= 5; ++order) {
    Rational sum = 0;
    for (const auto& w : nc_weights(order).weights) sum += w;
    CHECK(sum == 1);
  }
  for (int order = 2; order <= 5; ++order) {
    const NCWeights w = nc_weights(order);
    for (int p = 0; p <= 2 * order - 1; ++p) CHECK(w.moment(p) == Rational(1, p + 1));
    CHECK(w.moment(2 * order + 1) != Rational(1, 2 * order + 2));
  }
  // Boole's rule.
  CHECK(nc_weights(3).weights ==
        std::vector<Rational>{Rational(7, 90), Rational(32, 90), Rational(12, 90), Rational(32, 90), Rational(7, 90)});
}

TEST_CASE("cached table returns the same weights") {
  CHECK(nc_weights_cached(4).weights == nc_weights(4).weights);
  CHECK(&nc_weights_cached(4) == &nc_weights_cached(4));
}

TEST_CASE("order threshold") {
  CHECK(newton_cotes_order_for(0.6) == 1);
  CHECK(newton_cotes_order_for(0.4) == 1);
  CHECK(newton_cotes_order_for(1.0 / 6) == 2);
  CHECK(newton_cotes_order_for(0.12) == 2);
  CHECK(newton_cotes_order_for(0.1) == 3);
  CHECK(newton_cotes_order_for(0.05) == 5);
  CHECK_THROWS(newton_cotes_order_for(0.0));
}

TEST_CASE("telescoping identities") {
  const FbmPath p = sample_path(0.3, 500, 4);
  const double b1 = p.endpoint();
  for (int order = 0; order <= 4; ++order) {
    CHECK(nc_functional_sum(Expression::constant(1.0), p, order) == doctest::Approx(b1).epsilon(1e-12));
  }
  CHECK(nc_functional_sum(Expression::variable(), p, 1) == doctest::Approx(b1 * b1 / 2).epsilon(1e-12));
  // Simpson is exact for quadratics: f = x^2 gives B_1^3 / 3 at order 2.
  CHECK(nc_functional_sum(parse_expression("x^2"), p, 2) == doctest::Approx(b1 * b1 * b1 / 3).epsilon(1e-11));
}

TEST_CASE("trapezoid on f = x^2 approaches B_1^3 / 3, H = 0.6") {
  const Expression f = parse_expression("x^2");
  std::vector<double> ns, medians;
  for (int n = 256; n <= 4096; n *= 2) {
    const FbmSampler sampler(0.6, n);
    std::vector<double> err;
    for (int i = 0; i < 30; ++i) {
      const FbmPath p = sampler.sample(derive_seed(30, n, i));
      err.push_back(std::abs(nc_functional_sum(f, p, 1) - std::pow(p.endpoint(), 3) / 3));
    }
    ns.push_back(n);
    medians.push_back(oracle::median(err));
  }
  CHECK(oracle::decreasing_medians(ns, medians));
}

TEST_CASE("change of variables for cos at the threshold order") {
  const Expression f = parse_expression("cos(x)");
  for (double h : {0.6, 0.4}) {
    const int order = newton_cotes_order_for(h);
    std::vector<double> ns, medians;
    for (int n = 512; n <= 8192; n *= 2) {
      const FbmSampler sampler(h, n);
      std::vector<double> err;
      for (int i = 0; i < 50; ++i) {
        const FbmPath p = sampler.sample(derive_seed(31, n, i));
        err.push_back(std::abs(nc_functional_sum(f, p, order) - std::sin(p.endpoint())));
      }
      ns.push_back(n);
      medians.push_back(oracle::median(err));
    }
    INFO("H = " << h);
    CHECK(oracle::decreasing_medians(ns, medians));
  }
}

TEST_CASE("rational formatting") {
  CHECK(format_rational(Rational(3, 4)) == "3/4");
  CHECK(format_rational(Rational(-2, 1)) == "-2");
  CHECK(format_rational(Rational(6, 8)) == "3/4");
}
