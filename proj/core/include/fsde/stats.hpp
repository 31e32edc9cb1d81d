#pragma once

#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace fsde {

struct LogLogFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
};

/// OLS of log(statistic) on log(n). Needs >= 3 points and positive values.
LogLogFit regress_loglog(std::span<const std::pair<double, double>> points);

struct KsResult {
  double statistic = 0.0;
  double threshold = 0.0;  // asymptotic critical value at alpha
  double p_value = 1.0;    // asymptotic
  bool reject = false;
};

/// Two-sample Kolmogorov-Smirnov test with the asymptotic critical value
/// c(alpha) sqrt((n + m) / (n m)), c(alpha) = sqrt(-log(alpha / 2) / 2).
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b, double alpha = 0.01);

/// Survival function of the Kolmogorov distribution, P(K > lambda).
double kolmogorov_survival(double lambda);

struct SpearmanResult {
  double rho = 0.0;
  /// One-sided P(rho' >= rho) under independence; exact by permutation
  /// enumeration for up to 9 points, t-approximation beyond.
  double p_value_positive = 1.0;
};

SpearmanResult spearman(std::span<const double> x, std::span<const double> y);

double median(std::vector<double> values);
double mean(std::span<const double> values);
/// Standard error of the mean (sample standard deviation / sqrt(n)).
double standard_error(std::span<const double> values);

}  // namespace fsde
