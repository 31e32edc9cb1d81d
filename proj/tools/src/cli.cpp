#include "fsde_cli/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "fsde/newton_cotes.hpp"
#include "fsde/powervar.hpp"

namespace fsde::cli {

namespace fs = std::filesystem;

namespace {

struct Options {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<std::string> method;
  std::string input;
  std::optional<int> order;
  bool verbose = false;
};

std::string fmt(double v, const char* spec = "%.6g") {
  if (!std::isfinite(v)) return "-";
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : "-"; }

std::string g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

RunConfig load(const Options& opt) {
  if (opt.config.empty()) throw ConfigError("--config is required for this command");
  RunConfig rc = load_config(opt.config);
  ExperimentConfig& cfg = rc.experiment;
  if (opt.seed) cfg.seed = *opt.seed;
  if (opt.threads) cfg.threads = *opt.threads;
  if (opt.method) {
    try {
      cfg.method = parse_sampling_method(*opt.method);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("--method: ") + e.what());
    }
  }
  return rc;
}

Coefficient checked_coefficient(const ExperimentConfig& cfg) {
  ProbeOptions probe;
  probe.bounded = cfg.bounded;
  Coefficient c = Coefficient::parse(cfg.sigma, probe);
  c.require_elliptic("sigma");
  return c;
}

fs::path output_dir(const Options& opt, const fs::path& fallback) {
  fs::path dir = opt.out.empty() ? fallback : fs::path(opt.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw ConfigError("output directory '" + dir.string() + "' is not writable");
  }
  return dir;
}

void write_file(const fs::path& file, const std::string& content) {
  std::ofstream f(file, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + file.string() + "'");
  f << content;
  if (!f) throw std::runtime_error("write failed for '" + file.string() + "'");
}

void print_report(std::ostream& out, const ExperimentReport& r) {
  const ExperimentConfig& c = r.config;
  out << "sigma = " << c.sigma << ", x0 = " << c.x0 << ", H = " << c.hurst << ", scheme = "
      << to_string(c.scheme.kind);
  if (c.scheme.kind == SchemeKind::milstein_type) out << " (m = " << c.scheme.size << ")";
  out << ", paths = " << c.paths << "\n";
  out << "regime " << r.regime << ", scaling exponent " << fmt(r.exponent) << "\n\n";
  char line[256];
  std::snprintf(line, sizeof line, "%8s %6s %13s %13s %13s %13s %13s\n", "n", "ok",
                "median|err|", "mean|err|", "se", "median dev", "median|L|");
  out << line;
  for (const auto& s : r.summaries) {
    std::snprintf(line, sizeof line, "%8d %6d %13s %13s %13s %13s %13s\n", s.n, s.paths_ok,
                  fmt(s.median_abs_error).c_str(), fmt(s.mean_abs_error).c_str(),
                  fmt(s.se_abs_error).c_str(), fmt(s.median_deviation).c_str(),
                  fmt(s.median_abs_limit).c_str());
    out << line;
    if (s.ks) {
      out << "         KS D = " << fmt(s.ks->statistic) << " (threshold " << fmt(s.ks->threshold)
          << ", p = " << fmt(s.ks->p_value) << ")" << (s.ks->reject ? " reject" : " accept")
          << "\n";
    }
  }
  out << "\n";
  if (r.fit) {
    out << "fitted slope " << fmt(r.fit->slope) << " +/- " << fmt(r.fit->slope_se)
        << " (reference " << fmt(-r.exponent) << ")\n";
  }
  for (const auto& f : r.flags) out << "flag: " << f << "\n";
  for (const auto& w : r.warnings) out << "warning: " << w << "\n";
}

const char* kPlotScript = R"(import json
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

report_path = sys.argv[1] if len(sys.argv) > 1 else "report.json"
with open(report_path) as f:
    report = json.load(f)

ns = [s["n"] for s in report["summaries"]]
med = [s["median_abs_error"] for s in report["summaries"]]
fig, ax = plt.subplots()
ax.loglog(ns, med, "o-", label="median |endpoint error|")
if report.get("fit"):
    fit = report["fit"]
    import math
    ax.loglog(ns, [math.exp(fit["intercept"]) * n ** fit["slope"] for n in ns], "--",
              label="fit slope %.3f" % fit["slope"])
ax.set_xlabel("n")
ax.set_ylabel("error")
ax.legend()
fig.savefig(report_path.rsplit(".", 1)[0] + "_rates.png", dpi=120)
)";

int cmd_simulate(const Options& opt, std::ostream& out) {
  const RunConfig rc = load(opt);
  const ExperimentConfig& cfg = rc.experiment;
  cfg.validate();
  const Coefficient c = checked_coefficient(cfg);
  const int n = cfg.n_list.front();
  const FbmSampler sampler(cfg.hurst, n, cfg.method);
  const FbmPath path = sampler.sample(path_seed(cfg.seed, n, 0));
  const SchemeRunner runner(c, cfg.scheme, cfg.tolerance);
  const SchemeRun run = runner.run(cfg.x0, path);

  std::ostringstream csv;
  csv << "t,approx,exact,abs_error\n";
  for (int l = 0; l <= n; ++l) {
    csv << g17(static_cast<double>(l) / n) << ',' << g17(run.approx[l]) << ','
        << g17(run.exact[l]) << ',' << g17(std::abs(run.approx[l] - run.exact[l])) << '\n';
  }
  if (opt.out.empty()) {
    out << csv.str();
  } else {
    const fs::path dir = output_dir(opt, ".");
    write_file(dir / "trajectory.csv", csv.str());
    out << "wrote " << (dir / "trajectory.csv").string() << "\n";
  }
  return kOk;
}

int cmd_rates(const Options& opt, std::ostream& out, std::ostream& err) {
  const RunConfig rc = load(opt);
  const ExperimentConfig& cfg = rc.experiment;
  cfg.validate();
  (void)checked_coefficient(cfg);
  const fs::path dir = output_dir(opt, ".");

  const ExperimentReport report = run_rate_experiment(cfg);
  write_file(dir / "report.json", report_to_json(report));
  std::ostringstream csv;
  write_records_csv(csv, report.records);
  write_file(dir / "paths.csv", csv.str());
  print_report(out, report);
  if (opt.verbose) {
    err << "wall time " << fmt(report.wall_time_seconds) << " s; wrote "
        << (dir / "report.json").string() << " and " << (dir / "paths.csv").string() << "\n";
  }
  return kOk;
}

int cmd_powervar(const Options& opt, std::ostream& out) {
  const RunConfig rc = load(opt);
  const ExperimentConfig& cfg = rc.experiment;
  if (!(cfg.hurst > 0.0 && cfg.hurst < 1.0)) throw ConfigError("hurst must lie in (0, 1)");
  if (rc.kappa < 1) throw ConfigError("kappa must be >= 1");
  if (cfg.paths < 1) throw ConfigError("paths must be >= 1");
  if (cfg.n_list.empty()) throw ConfigError("n list must not be empty");
  for (std::size_t i = 0; i < cfg.n_list.size(); ++i) {
    if (cfg.n_list[i] < 1 || (i > 0 && cfg.n_list[i] <= cfg.n_list[i - 1])) {
      throw ConfigError("n list must be strictly increasing positive integers");
    }
  }
  Expression weight;
  try {
    weight = parse_expression(rc.weight);
  } catch (const ParseError& e) {
    throw ConfigError(std::string("weight: ") + e.what());
  }
  std::optional<FlowSolver> flow;
  if (rc.weight_on_flow) flow.emplace(checked_coefficient(cfg), cfg.tolerance);
  const PowerRegime regime = classify_power_regime(rc.kappa, cfg.hurst);
  const fs::path dir = output_dir(opt, ".");

  struct Row {
    std::uint64_t seed;
    int n;
    double raw;
    double scaled;
    std::optional<double> limit;
  };
  const int per_n = cfg.paths;
  const int total = per_n * static_cast<int>(cfg.n_list.size());
  std::vector<Row> rows(static_cast<std::size_t>(total));
  std::vector<FbmSampler> samplers;
  for (int n : cfg.n_list) samplers.emplace_back(cfg.hurst, n, cfg.method);
  const CompiledExpression hc(weight);

  parallel_for(total, cfg.threads, [&](int task) {
    const int ni = task / per_n;
    const int n = cfg.n_list[ni];
    const std::uint64_t seed = path_seed(cfg.seed, n, task % per_n);
    const FbmPath path = samplers[ni].sample(seed);
    Row& row = rows[static_cast<std::size_t>(task)];
    row.seed = seed;
    row.n = n;
    if (flow) {
      row.raw = weighted_power_variation(hc, flow->path(cfg.x0, path), path, rc.kappa);
    } else {
      row.raw = weighted_power_variation(hc, path.values, path, rc.kappa);
      row.limit = power_variation_limit(weight, path, rc.kappa, w_seed(seed));
    }
    row.scaled = scaled_variation(row.raw, n, rc.kappa, cfg.hurst);
  });

  std::ostringstream csv;
  csv << "seed,n,raw,scaled,limit,deviation\n";
  for (const auto& r : rows) {
    csv << r.seed << ',' << r.n << ',' << g17(r.raw) << ',' << g17(r.scaled) << ',';
    if (r.limit) csv << g17(*r.limit) << ',' << g17(std::abs(r.scaled - *r.limit));
    else csv << ',';
    csv << '\n';
  }
  write_file(dir / "powervar.csv", csv.str());

  out << "weight = " << rc.weight << (rc.weight_on_flow ? " at X" : " at B") << ", kappa = "
      << rc.kappa << ", H = " << cfg.hurst << ", regime " << to_string(regime) << ", scaling n^"
      << fmt(power_variation_exponent(rc.kappa, cfg.hurst)) << "\n";
  char line[160];
  std::snprintf(line, sizeof line, "%8s %14s %14s %14s\n", "n", "median scaled", "median dev",
                regime == PowerRegime::odd_brownian ? "KS D" : "");
  out << line;
  for (int n : cfg.n_list) {
    std::vector<double> scaled;
    std::vector<double> limits;
    std::vector<double> dev;
    for (const auto& r : rows) {
      if (r.n != n) continue;
      scaled.push_back(r.scaled);
      if (r.limit) {
        limits.push_back(*r.limit);
        dev.push_back(std::abs(r.scaled - *r.limit));
      }
    }
    std::string ks;
    if (regime == PowerRegime::odd_brownian && !limits.empty()) {
      const KsResult k = ks_two_sample(scaled, limits, cfg.ks_alpha);
      ks = fmt(k.statistic) + (k.reject ? " reject" : " accept");
    }
    std::snprintf(line, sizeof line, "%8d %14s %14s %14s\n", n, fmt(median(scaled)).c_str(),
                  dev.empty() ? "-" : fmt(median(dev)).c_str(), ks.c_str());
    out << line;
  }
  return kOk;
}

int cmd_ncweights(const Options& opt, std::ostream& out) {
  int order = 1;
  if (!opt.config.empty()) order = load(opt).order;
  if (opt.order) order = *opt.order;
  if (order < 0) throw ConfigError("order N must be >= 0");
  out << nc_weights(order).to_string() << "\n";
  return kOk;
}

int cmd_report(const Options& opt, std::ostream& out) {
  if (opt.input.empty()) throw ConfigError("report needs --input <report.json>");
  std::ifstream in(opt.input, std::ios::binary);
  if (!in) throw ConfigError("cannot open report '" + opt.input + "'");
  std::ostringstream text;
  text << in.rdbuf();
  const ExperimentReport report = report_from_json(text.str());
  print_report(out, report);
  fs::path fallback = fs::path(opt.input).parent_path();
  if (fallback.empty()) fallback = ".";
  const fs::path dir = output_dir(opt, fallback);
  write_file(dir / "plot_rates.py", kPlotScript);
  out << "\nplot script: " << (dir / "plot_rates.py").string() << "\n";
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Milstein-type schemes for fractional SDEs: simulation and error experiments",
               "fsde"};
  app.require_subcommand(1);
  Options opt;
  app.add_option("--config", opt.config, "YAML config file");
  app.add_option("--out", opt.out, "output directory");
  app.add_option("--seed", opt.seed, "override the config seed");
  app.add_option("--threads", opt.threads, "worker threads (0: all cores)")->check(CLI::NonNegativeNumber);
  app.add_option("--method", opt.method, "fBm sampler: circulant, cholesky or auto");
  app.add_flag("-v,--verbose", opt.verbose, "progress and timing on stderr");

  auto* simulate = app.add_subcommand("simulate", "one trajectory: t,approx,exact,abs_error");
  auto* rates = app.add_subcommand("rates", "Monte Carlo rate experiment: report.json + paths.csv");
  auto* powervar = app.add_subcommand("powervar", "weighted power variations: powervar.csv");
  auto* ncweights = app.add_subcommand("ncweights", "exact Newton-Cotes weights of order N");
  ncweights->add_option("-N,--order", opt.order, "order N >= 0");
  auto* report = app.add_subcommand("report", "print a saved report and write plot_rates.py");
  report->add_option("--input", opt.input, "report.json written by `rates`");

  for (auto* sub : {simulate, rates, powervar, ncweights, report}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*simulate) return cmd_simulate(opt, out);
    if (*rates) return cmd_rates(opt, out, err);
    if (*powervar) return cmd_powervar(opt, out);
    if (*ncweights) return cmd_ncweights(opt, out);
    if (*report) return cmd_report(opt, out);
  } catch (const ConfigError& e) {
    err << "fsde: configuration error: " << e.what() << "\n";
    return kConfigError;
  } catch (const RegimeError& e) {
    err << "fsde: configuration error: " << e.what() << "\n";
    return kConfigError;
  } catch (const ParseError& e) {
    err << "fsde: configuration error: " << e.what() << "\n";
    return kConfigError;
  } catch (const EllipticityError& e) {
    err << "fsde: configuration error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    err << "fsde: " << e.what() << "\n";
    return kRuntimeFailure;
  }
  return kConfigError;
}

}  // namespace fsde::cli
