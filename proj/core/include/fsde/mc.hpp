#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fsde/fbm.hpp"
#include "fsde/flow.hpp"
#include "fsde/limits.hpp"
#include "fsde/schemes.hpp"
#include "fsde/stats.hpp"

namespace fsde {

/// Invalid experiment configuration (reported before any computation).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ExperimentConfig {
  std::string sigma = "2 + sin(x)";
  double x0 = 0.0;
  double hurst = 0.7;
  SchemeSpec scheme = SchemeSpec::milstein(0);
  std::vector<int> n_list{256, 512, 1024};
  int paths = 100;
  std::uint64_t seed = 1;
  SamplingMethod method = SamplingMethod::automatic;
  bool bounded = false;
  std::string output;  // informational; the harness itself writes nothing
  int threads = 0;     // 0: hardware concurrency
  FlowTolerance tolerance{};
  double ks_alpha = 0.01;

  /// Throws ConfigError (RegimeError text for an inadmissible H).
  void validate() const;
};

/// Limit regime of a Milstein-type config; empty for Crank-Nicholson.
std::optional<LimitRegime> experiment_regime(const ExperimentConfig& cfg);

/// Exponent r used for the scaled error n^r (X^_1 - X_1): the convergence rate
/// for Milstein-type schemes, 3H - 1/2 for Crank-Nicholson.
double experiment_exponent(const ExperimentConfig& cfg);

struct PathRecord {
  std::uint64_t seed = 0;
  int n = 0;
  double endpoint_error = 0.0;          // X^_1 - X_1
  double scaled_error = 0.0;            // n^r (X^_1 - X_1)
  std::optional<double> limit_value;    // L(path); absent for Crank-Nicholson
  std::optional<double> deviation;      // |scaled_error - limit_value|
  double sup_error = 0.0;
  double max_increment = 0.0;
  bool ok = true;
  std::string error;
};

/// Fills scaled_error and deviation from the raw values.
PathRecord make_record(std::uint64_t seed, int n, double endpoint_error, double exponent,
                       std::optional<double> limit_value);

struct NSummary {
  int n = 0;
  int paths_ok = 0;
  std::vector<std::uint64_t> failed_seeds;
  double median_abs_error = 0.0;
  double mean_abs_error = 0.0;
  double se_abs_error = 0.0;
  std::optional<double> median_deviation;
  std::optional<double> mean_deviation;
  std::optional<double> se_deviation;
  std::optional<double> median_abs_limit;
  double median_sup_error = 0.0;
  /// median of sup_error / (n * max_increment^{m+2}); Milstein-type only.
  std::optional<double> median_sup_ratio;
  /// scaled errors against limit draws; odd_half only.
  std::optional<KsResult> ks;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::string regime;  // limit regime name, or "none"
  double exponent = 0.0;
  std::vector<NSummary> summaries;
  std::optional<LogLogFit> fit;  // median |endpoint error| against n
  std::vector<std::string> flags;
  std::vector<std::string> warnings;
  double wall_time_seconds = 0.0;
  std::vector<PathRecord> records;
};

/// For every n and path: sample B, run the scheme, compare with the exact
/// solution on the same path and evaluate the limit functional there.
ExperimentReport run_rate_experiment(const ExperimentConfig& cfg);

/// Rebuilds summaries, fit and flags from per-path records.
ExperimentReport aggregate_records(const ExperimentConfig& cfg, std::vector<PathRecord> records,
                                   bool degenerate_coefficient = false);

struct PathwiseCheck {
  int n = 0;
  std::vector<std::uint64_t> seeds;
  std::vector<double> deviations;
  std::vector<double> limit_values;
  double median_deviation = 0.0;
  double median_abs_limit = 0.0;
};

/// Deviations |n^r (X^_1 - X_1) - L(path)| at one n. Not defined for the
/// odd_half regime, whose limit holds only in law.
PathwiseCheck pathwise_limit_check(const ExperimentConfig& cfg, int n);

/// Same, from already computed records at that n.
PathwiseCheck pathwise_from_records(const std::vector<PathRecord>& records, int n);

/// Seed of path `index` at grid size n.
std::uint64_t path_seed(std::uint64_t base, int n, int index);
/// Seed of the independent Brownian motion paired with a path seed.
std::uint64_t w_seed(std::uint64_t path_seed);

/// Runs task(i) for i in [0, count) on up to `threads` workers (0: all cores).
void parallel_for(int count, int threads, const std::function<void(int)>& task);

/// JSON report; `with_timing = false` drops the wall-time field.
std::string report_to_json(const ExperimentReport& report, bool with_timing = true);
ExperimentReport report_from_json(const std::string& text);

/// CSV `seed,n,endpoint_error,scaled_error,limit_value,deviation`; failed paths
/// and missing limits leave the field empty.
void write_records_csv(std::ostream& out, const std::vector<PathRecord>& records);

}  // namespace fsde
