#include "fsde/mc.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <ostream>
#include <thread>

#include "fsde/rng.hpp"
#include "json.hpp"

#ifndef FSDE_VERSION
#define FSDE_VERSION "unknown"
#endif

namespace fsde {

using nlohmann::json;

void ExperimentConfig::validate() const {
  try {
    scheme.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (sigma.empty()) throw ConfigError("sigma must not be empty");
  try {
    (void)parse_sigma(sigma);
  } catch (const ParseError& e) {
    throw ConfigError("sigma: " + std::string(e.what()));
  }
  if (!std::isfinite(x0)) throw ConfigError("x0 must be finite");
  if (!(hurst > 0.0 && hurst < 1.0)) throw ConfigError("hurst must lie in (0, 1)");
  if (scheme.kind == SchemeKind::milstein_type) {
    try {
      (void)classify_limit_regime(scheme.size, hurst);
    } catch (const RegimeError& e) {
      throw ConfigError(e.what());
    }
  }
  if (n_list.empty()) throw ConfigError("n list must not be empty");
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    if (n_list[i] < 1) throw ConfigError("n values must be >= 1");
    if (i > 0 && n_list[i] <= n_list[i - 1]) throw ConfigError("n list must be strictly increasing");
  }
  if (paths < 1) throw ConfigError("paths must be >= 1");
  if (threads < 0) throw ConfigError("threads must be >= 0");
  if (!(tolerance.absolute > 0.0) || !(tolerance.relative > 0.0)) {
    throw ConfigError("flow tolerances must be positive");
  }
  if (!(ks_alpha > 0.0 && ks_alpha < 1.0)) throw ConfigError("ks_alpha must lie in (0, 1)");
}

std::optional<LimitRegime> experiment_regime(const ExperimentConfig& cfg) {
  if (cfg.scheme.kind != SchemeKind::milstein_type) return std::nullopt;
  return classify_limit_regime(cfg.scheme.size, cfg.hurst);
}

double experiment_exponent(const ExperimentConfig& cfg) {
  if (cfg.scheme.kind == SchemeKind::crank_nicholson) return 3.0 * cfg.hurst - 0.5;
  return rate_exponent(cfg.scheme.size, cfg.hurst);
}

PathRecord make_record(std::uint64_t seed, int n, double endpoint_error, double exponent,
                       std::optional<double> limit_value) {
  PathRecord r;
  r.seed = seed;
  r.n = n;
  r.endpoint_error = endpoint_error;
  r.scaled_error = std::pow(static_cast<double>(n), exponent) * endpoint_error;
  r.limit_value = limit_value;
  if (limit_value) r.deviation = std::abs(r.scaled_error - *limit_value);
  return r;
}

std::uint64_t path_seed(std::uint64_t base, int n, int index) {
  return derive_seed(base, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(index));
}

std::uint64_t w_seed(std::uint64_t path_seed) { return derive_seed(path_seed, 0x57ULL, 1); }

void parallel_for(int count, int threads, const std::function<void(int)>& task) {
  if (count <= 0) return;
  int workers = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::clamp(workers, 1, count);
  if (workers == 1) {
    for (int i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
      try {
        task(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers - 1));
  for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

namespace {

constexpr double kDegenerateError = 1e-10;

std::vector<double> collect(const std::vector<PathRecord>& records, int n,
                            double (*field)(const PathRecord&)) {
  std::vector<double> out;
  for (const auto& r : records) {
    if (r.n == n && r.ok) out.push_back(field(r));
  }
  return out;
}

}  // namespace

ExperimentReport aggregate_records(const ExperimentConfig& cfg, std::vector<PathRecord> records,
                                   bool degenerate_coefficient) {
  ExperimentReport report;
  report.config = cfg;
  const auto regime = experiment_regime(cfg);
  report.regime = regime ? to_string(*regime) : "none";
  report.exponent = experiment_exponent(cfg);
  const bool half = regime == LimitRegime::odd_half;
  const bool milstein = cfg.scheme.kind == SchemeKind::milstein_type;

  bool degenerate = degenerate_coefficient;
  std::vector<std::pair<double, double>> fit_points;
  int failures = 0;
  for (int n : cfg.n_list) {
    NSummary s;
    s.n = n;
    for (const auto& r : records) {
      if (r.n != n) continue;
      if (r.ok) {
        ++s.paths_ok;
      } else {
        s.failed_seeds.push_back(r.seed);
        ++failures;
      }
    }
    if (s.paths_ok > 0) {
      const auto abs_err = collect(records, n, [](const PathRecord& r) { return std::abs(r.endpoint_error); });
      s.median_abs_error = median(abs_err);
      s.mean_abs_error = mean(abs_err);
      s.se_abs_error = standard_error(abs_err);
      s.median_sup_error =
          median(collect(records, n, [](const PathRecord& r) { return r.sup_error; }));

      std::vector<double> deviations;
      std::vector<double> abs_limits;
      std::vector<double> limits;
      std::vector<double> scaled;
      std::vector<double> ratios;
      for (const auto& r : records) {
        if (r.n != n || !r.ok) continue;
        scaled.push_back(r.scaled_error);
        if (r.deviation) deviations.push_back(*r.deviation);
        if (r.limit_value) {
          limits.push_back(*r.limit_value);
          abs_limits.push_back(std::abs(*r.limit_value));
        }
        if (milstein && r.max_increment > 0.0) {
          ratios.push_back(r.sup_error /
                           (n * std::pow(r.max_increment, cfg.scheme.size + 2)));
        }
      }
      if (!deviations.empty()) {
        s.median_deviation = median(deviations);
        s.mean_deviation = mean(deviations);
        s.se_deviation = standard_error(deviations);
      }
      if (!abs_limits.empty()) s.median_abs_limit = median(abs_limits);
      if (!ratios.empty()) s.median_sup_ratio = median(ratios);
      if (half && !limits.empty()) s.ks = ks_two_sample(scaled, limits, cfg.ks_alpha);
      if (s.median_abs_error <= kDegenerateError) degenerate = true;
      fit_points.emplace_back(static_cast<double>(n), s.median_abs_error);
    }
    report.summaries.push_back(std::move(s));
  }

  if (degenerate) {
    report.flags.emplace_back("degenerate: exact scheme");
  } else if (fit_points.size() >= 3) {
    report.fit = regress_loglog(fit_points);
  } else {
    report.flags.emplace_back("fit unavailable: fewer than 3 grid sizes");
  }
  if (failures > 0) report.flags.push_back("failed paths: " + std::to_string(failures));
  report.records = std::move(records);
  return report;
}

ExperimentReport run_rate_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();

  ProbeOptions probe;
  probe.bounded = cfg.bounded;
  const Coefficient c = Coefficient::parse(cfg.sigma, probe);
  const SchemeRunner runner(c, cfg.scheme, cfg.tolerance);
  const auto regime = experiment_regime(cfg);
  std::optional<LimitEvaluator> evaluator;
  if (regime) evaluator.emplace(c, cfg.scheme.size, cfg.tolerance);
  const double exponent = experiment_exponent(cfg);

  std::vector<FbmSampler> samplers;
  samplers.reserve(cfg.n_list.size());
  for (int n : cfg.n_list) samplers.emplace_back(cfg.hurst, n, cfg.method);

  const int per_n = cfg.paths;
  const int total = per_n * static_cast<int>(cfg.n_list.size());
  std::vector<PathRecord> records(static_cast<std::size_t>(total));

  parallel_for(total, cfg.threads, [&](int task) {
    const int ni = task / per_n;
    const int index = task % per_n;
    const int n = cfg.n_list[ni];
    const std::uint64_t seed = path_seed(cfg.seed, n, index);
    PathRecord& slot = records[static_cast<std::size_t>(task)];
    try {
      const FbmPath path = samplers[ni].sample(seed);
      const SchemeRun run = runner.run(cfg.x0, path);
      std::optional<double> limit;
      if (evaluator) limit = evaluator->evaluate(cfg.x0, path, run.exact, w_seed(seed)).value;
      slot = make_record(seed, n, run.endpoint_error, exponent, limit);
      if (regime == LimitRegime::odd_half) slot.deviation.reset();
      slot.sup_error = run.sup_error;
      slot.max_increment = max_increment(path);
      if (!std::isfinite(slot.endpoint_error)) throw SchemeError("non-finite endpoint error", n);
    } catch (const std::exception& e) {
      slot = PathRecord{};
      slot.seed = seed;
      slot.n = n;
      slot.ok = false;
      slot.error = e.what();
    }
  });

  ExperimentReport report = aggregate_records(cfg, std::move(records), c.is_constant());
  report.warnings = c.warnings();
  report.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

PathwiseCheck pathwise_from_records(const std::vector<PathRecord>& records, int n) {
  PathwiseCheck check;
  check.n = n;
  std::vector<double> abs_limits;
  for (const auto& r : records) {
    if (r.n != n || !r.ok) continue;
    if (!r.deviation || !r.limit_value) {
      throw RegimeError("pathwise_limit_check: records carry no pathwise limit");
    }
    check.seeds.push_back(r.seed);
    check.deviations.push_back(*r.deviation);
    check.limit_values.push_back(*r.limit_value);
    abs_limits.push_back(std::abs(*r.limit_value));
  }
  if (check.deviations.empty()) {
    throw std::invalid_argument("pathwise_limit_check: no successful paths at n = " +
                                std::to_string(n));
  }
  check.median_deviation = median(check.deviations);
  check.median_abs_limit = median(abs_limits);
  return check;
}

PathwiseCheck pathwise_limit_check(const ExperimentConfig& cfg, int n) {
  ExperimentConfig one = cfg;
  one.n_list = {n};
  one.validate();
  const auto regime = experiment_regime(one);
  if (!regime) throw RegimeError("pathwise_limit_check: Crank-Nicholson has no limit functional");
  if (*regime == LimitRegime::odd_half) {
    throw RegimeError("pathwise_limit_check: m odd and H = 1/2 converges in law only");
  }
  return pathwise_from_records(run_rate_experiment(one).records, n);
}

// JSON ------------------------------------------------------------------

namespace {

json optional_number(const std::optional<double>& v) {
  if (!v || !std::isfinite(*v)) return nullptr;
  return *v;
}

std::optional<double> read_optional(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

double read_number(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nan("");
  return j.at(key).get<double>();
}

json config_to_json(const ExperimentConfig& c) {
  return json{{"sigma", c.sigma},
              {"x0", c.x0},
              {"hurst", c.hurst},
              {"scheme", to_string(c.scheme.kind)},
              {"m", c.scheme.size},
              {"fixed_point_tolerance", c.scheme.fixed_point_tolerance},
              {"max_iterations", c.scheme.max_iterations},
              {"n", c.n_list},
              {"paths", c.paths},
              {"seed", c.seed},
              {"method", to_string(c.method)},
              {"bounded", c.bounded},
              {"flow_tolerance", {{"absolute", c.tolerance.absolute}, {"relative", c.tolerance.relative}}},
              {"ks_alpha", c.ks_alpha}};
}

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c;
  c.sigma = j.at("sigma").get<std::string>();
  c.x0 = j.at("x0").get<double>();
  c.hurst = j.at("hurst").get<double>();
  c.scheme.kind = parse_scheme_kind(j.at("scheme").get<std::string>());
  c.scheme.size = j.at("m").get<int>();
  c.scheme.fixed_point_tolerance = j.value("fixed_point_tolerance", c.scheme.fixed_point_tolerance);
  c.scheme.max_iterations = j.value("max_iterations", c.scheme.max_iterations);
  c.n_list = j.at("n").get<std::vector<int>>();
  c.paths = j.at("paths").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.method = parse_sampling_method(j.at("method").get<std::string>());
  c.bounded = j.value("bounded", false);
  if (j.contains("flow_tolerance")) {
    c.tolerance.absolute = j.at("flow_tolerance").at("absolute").get<double>();
    c.tolerance.relative = j.at("flow_tolerance").at("relative").get<double>();
  }
  c.ks_alpha = j.value("ks_alpha", c.ks_alpha);
  return c;
}

}  // namespace

std::string report_to_json(const ExperimentReport& report, bool with_timing) {
  json summaries = json::array();
  for (const auto& s : report.summaries) {
    json js{{"n", s.n},
            {"paths_ok", s.paths_ok},
            {"failed_seeds", s.failed_seeds},
            {"median_abs_error", s.median_abs_error},
            {"mean_abs_error", s.mean_abs_error},
            {"se_abs_error", s.se_abs_error},
            {"median_deviation", optional_number(s.median_deviation)},
            {"mean_deviation", optional_number(s.mean_deviation)},
            {"se_deviation", optional_number(s.se_deviation)},
            {"median_abs_limit", optional_number(s.median_abs_limit)},
            {"median_sup_error", s.median_sup_error},
            {"median_sup_ratio", optional_number(s.median_sup_ratio)}};
    if (s.ks) {
      js["ks"] = {{"statistic", s.ks->statistic},
                  {"threshold", s.ks->threshold},
                  {"p_value", s.ks->p_value},
                  {"reject", s.ks->reject}};
    } else {
      js["ks"] = nullptr;
    }
    summaries.push_back(std::move(js));
  }
  json records = json::array();
  for (const auto& r : report.records) {
    records.push_back({{"seed", r.seed},
                       {"n", r.n},
                       {"endpoint_error", optional_number(r.endpoint_error)},
                       {"scaled_error", optional_number(r.scaled_error)},
                       {"limit_value", optional_number(r.limit_value)},
                       {"deviation", optional_number(r.deviation)},
                       {"sup_error", optional_number(r.sup_error)},
                       {"max_increment", optional_number(r.max_increment)},
                       {"ok", r.ok},
                       {"error", r.error}});
  }
  json fit = nullptr;
  if (report.fit) {
    fit = {{"slope", report.fit->slope},
           {"intercept", report.fit->intercept},
           {"slope_se", report.fit->slope_se}};
  }
  json metadata{{"version", FSDE_VERSION}, {"base_seed", report.config.seed}};
  if (with_timing) metadata["wall_time_seconds"] = report.wall_time_seconds;
  json doc{{"config", config_to_json(report.config)},
           {"regime", report.regime},
           {"exponent", report.exponent},
           {"summaries", std::move(summaries)},
           {"fit", std::move(fit)},
           {"flags", report.flags},
           {"warnings", report.warnings},
           {"metadata", std::move(metadata)},
           {"records", std::move(records)}};
  return doc.dump(2) + "\n";
}

ExperimentReport report_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("report: invalid JSON: ") + e.what());
  }
  try {
    ExperimentReport report;
    report.config = config_from_json(doc.at("config"));
    report.regime = doc.at("regime").get<std::string>();
    report.exponent = doc.at("exponent").get<double>();
    for (const auto& js : doc.at("summaries")) {
      NSummary s;
      s.n = js.at("n").get<int>();
      s.paths_ok = js.at("paths_ok").get<int>();
      s.failed_seeds = js.at("failed_seeds").get<std::vector<std::uint64_t>>();
      s.median_abs_error = read_number(js, "median_abs_error");
      s.mean_abs_error = read_number(js, "mean_abs_error");
      s.se_abs_error = read_number(js, "se_abs_error");
      s.median_deviation = read_optional(js, "median_deviation");
      s.mean_deviation = read_optional(js, "mean_deviation");
      s.se_deviation = read_optional(js, "se_deviation");
      s.median_abs_limit = read_optional(js, "median_abs_limit");
      s.median_sup_error = read_number(js, "median_sup_error");
      s.median_sup_ratio = read_optional(js, "median_sup_ratio");
      if (js.contains("ks") && !js.at("ks").is_null()) {
        const json& k = js.at("ks");
        s.ks = KsResult{k.at("statistic").get<double>(), k.at("threshold").get<double>(),
                        k.at("p_value").get<double>(), k.at("reject").get<bool>()};
      }
      report.summaries.push_back(std::move(s));
    }
    if (!doc.at("fit").is_null()) {
      const json& f = doc.at("fit");
      report.fit = LogLogFit{f.at("slope").get<double>(), f.at("intercept").get<double>(),
                             f.at("slope_se").get<double>()};
    }
    report.flags = doc.at("flags").get<std::vector<std::string>>();
    report.warnings = doc.at("warnings").get<std::vector<std::string>>();
    report.wall_time_seconds = doc.at("metadata").value("wall_time_seconds", 0.0);
    for (const auto& jr : doc.at("records")) {
      PathRecord r;
      r.seed = jr.at("seed").get<std::uint64_t>();
      r.n = jr.at("n").get<int>();
      r.endpoint_error = read_number(jr, "endpoint_error");
      r.scaled_error = read_number(jr, "scaled_error");
      r.limit_value = read_optional(jr, "limit_value");
      r.deviation = read_optional(jr, "deviation");
      r.sup_error = read_number(jr, "sup_error");
      r.max_increment = read_number(jr, "max_increment");
      r.ok = jr.at("ok").get<bool>();
      r.error = jr.at("error").get<std::string>();
      report.records.push_back(std::move(r));
    }
    return report;
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("report: malformed document: ") + e.what());
  }
}

void write_records_csv(std::ostream& out, const std::vector<PathRecord>& records) {
  out << "seed,n,endpoint_error,scaled_error,limit_value,deviation\n";
  char buf[64];
  auto number = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  for (const auto& r : records) {
    out << r.seed << ',' << r.n << ',';
    if (r.ok) {
      out << number(r.endpoint_error) << ',' << number(r.scaled_error) << ',';
      if (r.limit_value) out << number(*r.limit_value);
      out << ',';
      if (r.deviation) out << number(*r.deviation);
    } else {
      out << ",,,";
    }
    out << '\n';
  }
}

}  // namespace fsde
