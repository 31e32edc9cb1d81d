#include <cmath>
#include <random>

#include "doctest.h"
#include "fsde/stats.hpp"
#include "oracles.hpp"

using namespace fsde;

namespace {

// Brute-force sup |F_a - F_b| over all sample points.
double ks_brute(const std::vector<double>& a, const std::vector<double>& b) {
  auto ecdf = [](const std::vector<double>& s, double x) {
    double c = 0;
    for (double v : s) c += v <= x;
    return c / static_cast<double>(s.size());
  };
  double d = 0.0;
  for (const auto* s : {&a, &b})
    for (double x : *s) d = std::max(d, std::abs(ecdf(a, x) - ecdf(b, x)));
  return d;
}

}  // namespace

TEST_CASE("log-log regression") {
  std::vector<std::pair<double, double>> sq, flat, decay;
  for (double n : {256.0, 512.0, 1024.0, 2048.0}) {
    sq.emplace_back(n, n * n);
    flat.emplace_back(n, 5.0);
    decay.emplace_back(n, 3.0 * std::pow(n, -1.4));
  }
  CHECK(regress_loglog(sq).slope == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(regress_loglog(flat).slope == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  const LogLogFit f = regress_loglog(decay);
  CHECK(f.slope == doctest::Approx(-1.4).epsilon(1e-12));
  CHECK(f.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-12));
  CHECK(f.slope_se < 1e-10);

  std::vector<std::pair<double, double>> noisy{{1, 1.0}, {2, 0.6}, {4, 0.2}, {8, 0.15}};
  std::vector<double> xs, ys;
  for (auto [x, y] : noisy) xs.push_back(x), ys.push_back(y);
  CHECK(regress_loglog(noisy).slope == doctest::Approx(oracle::loglog_slope(xs, ys)).epsilon(1e-12));
  CHECK(regress_loglog(noisy).slope_se > 0.0);

  std::vector<std::pair<double, double>> two{{1, 1}, {2, 2}};
  CHECK_THROWS(regress_loglog(two));
  std::vector<std::pair<double, double>> zero{{1, 1}, {2, 0}, {4, 1}};
  CHECK_THROWS(regress_loglog(zero));
}

TEST_CASE("Kolmogorov-Smirnov statistic") {
  const std::vector<double> a{0.1, 0.4, 0.7, 1.2}, b{0.3, 0.5, 2.0};
  CHECK(ks_two_sample(a, a).statistic == 0.0);
  CHECK(ks_two_sample(std::vector<double>{0.0}, std::vector<double>{1.0}).statistic == 1.0);
  CHECK(ks_two_sample(a, b).statistic == doctest::Approx(ks_brute(a, b)).epsilon(1e-15));
  const std::vector<double> ties_a{1, 1, 2, 2, 3}, ties_b{1, 2, 2, 2, 4, 4};
  CHECK(ks_two_sample(ties_a, ties_b).statistic == doctest::Approx(ks_brute(ties_a, ties_b)).epsilon(1e-15));
  CHECK_THROWS(ks_two_sample(std::vector<double>{}, a));

  const KsResult r = ks_two_sample(a, b, 0.01);
  CHECK(r.threshold == doctest::Approx(std::sqrt(-0.5 * std::log(0.005)) * std::sqrt(7.0 / 12.0)));
  CHECK(kolmogorov_survival(0.0) == 1.0);
  CHECK(kolmogorov_survival(std::sqrt(-0.5 * std::log(0.005))) == doctest::Approx(0.01).epsilon(1e-3));
  CHECK(kolmogorov_survival(1.3581) == doctest::Approx(0.05).epsilon(1e-3));
}

TEST_CASE("KS accepts samples from the same distribution") {
  std::mt19937_64 rng(99);
  std::normal_distribution<double> z;
  int accepted = 0;
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<double> a(2000), b(2000);
    for (auto& v : a) v = z(rng);
    for (auto& v : b) v = z(rng);
    accepted += !ks_two_sample(a, b, 0.01).reject;
  }
  CHECK(accepted >= 95);

  std::vector<double> a(2000), b(2000);
  for (auto& v : a) v = z(rng);
  for (auto& v : b) v = z(rng) + 0.3;
  CHECK(ks_two_sample(a, b, 0.01).reject);
}

TEST_CASE("Spearman rank correlation") {
  const std::vector<double> x{1, 2, 3, 4, 5};
  CHECK(spearman(x, std::vector<double>{2, 4, 6, 8, 10}).rho == doctest::Approx(1.0));
  CHECK(spearman(x, std::vector<double>{5, 4, 3, 2, 1}).rho == doctest::Approx(-1.0));
  // Perfect increase with 5 points: exactly 1 of 120 permutations reaches rho = 1.
  CHECK(spearman(x, std::vector<double>{1, 3, 7, 9, 20}).p_value_positive == doctest::Approx(1.0 / 120));
  CHECK(spearman(x, std::vector<double>{5, 4, 3, 2, 1}).p_value_positive == doctest::Approx(1.0));
  // 1 - 6 sum d^2 / (n (n^2 - 1)) with d = (0, 0, 1, -1, 0).
  CHECK(spearman(x, std::vector<double>{1, 2, 5, 3, 9}).rho == doctest::Approx(1.0 - 12.0 / 120));

  std::vector<double> big_x, big_y;
  for (int i = 0; i < 30; ++i) {
    big_x.push_back(i);
    big_y.push_back(std::sin(1.7 * i));
  }
  const SpearmanResult r = spearman(big_x, big_y);
  CHECK(r.p_value_positive > 0.0);
  CHECK(r.p_value_positive < 1.0);
  CHECK_THROWS(spearman(x, std::vector<double>{1, 2}));
}

TEST_CASE("median, mean and standard error") {
  CHECK(median({3, 1, 2}) == 2);
  CHECK(median({4, 1, 3, 2}) == 2.5);
  CHECK_THROWS(median({}));
  const std::vector<double> v{1, 2, 3, 4};
  CHECK(mean(v) == 2.5);
  CHECK(standard_error(v) == doctest::Approx(oracle::sem(v)));
}
