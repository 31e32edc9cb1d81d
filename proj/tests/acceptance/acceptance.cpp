// Acceptance suite: one PASS/FAIL line per criterion, reference coefficient
// sigma(x) = 2 + sin(x), x0 = 0. Exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "fsde/mc.hpp"
#include "fsde/newton_cotes.hpp"
#include "fsde/powervar.hpp"
#include "fsde/rng.hpp"
#include "oracles.hpp"

using namespace fsde;

namespace {

const char* kSigma = "2 + sin(x)";
constexpr double kRoundoff = 100 * 2.220446049250313e-16;
const std::vector<int> kRateGrid{256, 512, 1024, 2048, 4096, 8192};

int failures = 0;

void verdict(int id, bool pass, const std::string& what) {
  std::printf("%s %2d  %s\n", pass ? "PASS" : "FAIL", id, what.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ExperimentConfig rate_config(int m, double hurst, std::vector<int> ns = kRateGrid, int paths = 200) {
  ExperimentConfig cfg;
  cfg.sigma = kSigma;
  cfg.x0 = 0.0;
  cfg.hurst = hurst;
  cfg.scheme = SchemeSpec::milstein(m);
  cfg.n_list = std::move(ns);
  cfg.paths = paths;
  cfg.seed = 42;
  return cfg;
}

bool slope_within(const ExperimentReport& r, double target, double tol, std::string& detail) {
  if (!r.fit) {
    detail = "no fit";
    return false;
  }
  detail = "slope " + fmt("%.3f", r.fit->slope) + " (target " + fmt("%.2f", target) + " +/- " +
           fmt("%.2f", tol) + ")";
  return std::abs(r.fit->slope - target) <= tol;
}

// Decreasing-median criterion used by the convergence checks.
std::string medians_text(const std::vector<double>& ns, const std::vector<double>& med) {
  std::string s;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    s += (i ? ", " : "") + fmt("2^%.0f:", std::log2(ns[i])) + fmt("%.3g", med[i]);
  }
  return s;
}

struct DecreaseCheck {
  bool pass;
  std::string text;
};

DecreaseCheck decreasing(const std::vector<double>& ns, const std::vector<double>& med) {
  return {oracle::decreasing_medians(ns, med), medians_text(ns, med)};
}

// Median |scaled variation - limit| per n for weight h at B.
DecreaseCheck powervar_convergence(const Expression& h, int kappa, double hurst, int paths,
                                   std::uint64_t seed) {
  std::vector<double> ns, med;
  for (int n = 512; n <= 8192; n *= 2) {
    const FbmSampler sampler(hurst, n);
    std::vector<double> dev;
    for (int i = 0; i < paths; ++i) {
      const FbmPath p = sampler.sample(path_seed(seed, n, i));
      const double scaled = scaled_variation(weighted_power_variation(h, p, kappa), n, kappa, hurst);
      dev.push_back(std::abs(scaled - power_variation_limit(h, p, kappa)));
    }
    ns.push_back(n);
    med.push_back(oracle::median(dev));
  }
  return decreasing(ns, med);
}

}  // namespace

int main() {
  const auto suite_start = std::chrono::steady_clock::now();
  std::map<int, ExperimentReport> rate;

  // 1-4: rates.
  struct RateCase {
    int id, m;
    double hurst, target;
  };
  for (const RateCase& c : {RateCase{1, 0, 0.7, -0.40}, RateCase{2, 2, 0.35, -0.40},
                            RateCase{3, 1, 0.45, -0.80}, RateCase{4, 1, 0.7, -1.40}}) {
    const auto t0 = std::chrono::steady_clock::now();
    ExperimentReport r = run_rate_experiment(rate_config(c.m, c.hurst));
    const double wall = seconds_since(t0);
    std::string detail;
    bool pass = slope_within(r, c.target, 0.10, detail);
    pass = pass && r.flags.empty();
    if (c.id == 1) pass = pass && wall < 120.0;
    verdict(c.id, pass,
            "rate m=" + std::to_string(c.m) + " H=" + fmt("%.2f", c.hurst) + ": " + detail + ", " +
                fmt("%.1f", wall) + " s");
    rate.emplace(c.id, std::move(r));
  }

  // 5: pathwise limits for cases 1, 3, 4.
  {
    bool pass = true;
    std::string detail;
    for (int id : {1, 3, 4}) {
      const PathwiseCheck early = pathwise_from_records(rate.at(id).records, 1024);
      const PathwiseCheck late = pathwise_from_records(rate.at(id).records, 8192);
      const bool shrinks = late.median_deviation < early.median_deviation;
      const bool small = late.median_deviation < 0.25 * late.median_abs_limit;
      pass = pass && shrinks && small;
      detail += " case " + std::to_string(id) + ": dev " + fmt("%.3g", early.median_deviation) + " -> " +
                fmt("%.3g", late.median_deviation) + " vs 0.25 median|L| " +
                fmt("%.3g", 0.25 * late.median_abs_limit) + (shrinks && small ? " ok;" : " no;");
    }
    verdict(5, pass, "pathwise limit:" + detail);
  }

  // 6: mixed law at H = 1/2.
  {
    ExperimentReport r = run_rate_experiment(rate_config(1, 0.5, {4096}, 2000));
    const auto& ks = r.summaries.at(0).ks;
    const bool pass = ks && !ks->reject && r.summaries[0].paths_ok == 2000;
    verdict(6, pass,
            "mixed law m=1 H=0.5 n=2^12: KS D " + fmt("%.4f", ks ? ks->statistic : NAN) + ", threshold " +
                fmt("%.4f", ks ? ks->threshold : NAN) + ", p " + fmt("%.3f", ks ? ks->p_value : NAN));
  }

  // 7: weighted power variations.
  {
    const Expression h = parse_expression("2 + cos(x)");
    bool pass = true;
    std::string detail;
    for (double hurst : {0.3, 0.5, 0.7}) {
      const DecreaseCheck d = powervar_convergence(h, 2, hurst, 100, 701);
      pass = pass && d.pass;
      detail += " k=2 H=" + fmt("%.1f", hurst) + (d.pass ? " ok" : " no") + " [" + d.text + "];";
    }
    for (double hurst : {0.4, 0.7}) {
      const DecreaseCheck d = powervar_convergence(h, 3, hurst, 100, 703);
      pass = pass && d.pass;
      detail += " k=3 H=" + fmt("%.1f", hurst) + (d.pass ? " ok" : " no") + " [" + d.text + "];";
    }
    {
      const int n = 4096;
      const FbmSampler sampler(0.5, n);
      std::vector<double> scaled, limits;
      for (int i = 0; i < 2000; ++i) {
        const std::uint64_t seed = path_seed(705, n, i);
        const FbmPath p = sampler.sample(seed);
        scaled.push_back(scaled_variation(weighted_power_variation(h, p, 3), n, 3, 0.5));
        limits.push_back(power_variation_limit(h, p, 3, w_seed(seed)));
      }
      const KsResult ks = ks_two_sample(scaled, limits, 0.01);
      pass = pass && !ks.reject;
      detail += " k=3 H=0.5 KS D " + fmt("%.4f", ks.statistic) + (ks.reject ? " reject;" : " accept;");
    }
    {
      const CompiledExpression f(h);
      std::vector<double> ns, moments;
      for (int n = 256; n <= 4096; n *= 2) {
        const FbmSampler sampler(0.45, n);
        double sum = 0.0;
        for (int i = 0; i < 1000; ++i) {
          const FbmPath p = sampler.sample(path_seed(707, n, i));
          const double s = s_statistic(f, p.values, p, 3, n);
          sum += s * s;
        }
        ns.push_back(n);
        moments.push_back(sum / 1000 / std::pow(n, std::max(1.0, 2.0 - 2.0 * 0.45 * 3)));
      }
      const SpearmanResult sp = spearman(ns, moments);
      const bool bounded = sp.p_value_positive >= 0.05;
      pass = pass && bounded;
      detail += " S^(3) H=0.45 E|S|^2/n [" + medians_text(ns, moments) + "] Spearman " +
                fmt("%.2f", sp.rho) + " p " + fmt("%.3f", sp.p_value_positive);
    }
    verdict(7, pass, "power variations:" + detail);
  }

  // 8: sup-error bound.
  {
    ExperimentReport r = run_rate_experiment(rate_config(1, 0.45, {256, 512, 1024, 2048, 4096}, 100));
    std::vector<double> ns, ratios;
    for (const auto& s : r.summaries) {
      ns.push_back(s.n);
      ratios.push_back(s.median_sup_ratio.value_or(NAN));
    }
    const SpearmanResult sp = spearman(ns, ratios);
    verdict(8, sp.p_value_positive >= 0.05,
            "sup error / (n Delta^3), m=1 H=0.45: [" + medians_text(ns, ratios) + "] Spearman " +
                fmt("%.2f", sp.rho) + " p " + fmt("%.3f", sp.p_value_positive));
  }

  const Coefficient reference = Coefficient::parse(kSigma);

  // 9: flow Taylor remainder.
  {
    const FlowSolver flow(reference, FlowTolerance{1e-16, 1e-16});
    bool pass = true;
    std::string detail;
    for (int m = 0; m <= 2; ++m) {
      double worst = 0.0;
      for (double x : {-1.0, 0.0, 1.0}) {
        std::vector<double> ys, rs;
        for (int k = 4; k <= 10; ++k) {
          const double y = std::ldexp(1.0, -k);
          const double exact = flow.eval(x, y);
          const double r = std::abs(exact - flow.taylor(x, y, m));
          if (r < kRoundoff * std::max(1.0, std::abs(exact))) continue;
          ys.push_back(y);
          rs.push_back(r);
        }
        if (ys.size() < 3) {
          pass = false;
          continue;
        }
        const double dev = oracle::loglog_slope(ys, rs) - (m + 4);
        if (std::abs(dev) > std::abs(worst)) worst = dev;
        pass = pass && std::abs(dev) <= 0.3;
      }
      detail += " m=" + std::to_string(m) + " worst slope offset " + fmt("%+.3f", worst) + ";";
    }
    verdict(9, pass, "flow Taylor remainder order m+4:" + detail);
  }

  // 10: group property.
  {
    const FlowSolver flow(reference);
    std::mt19937_64 rng(10);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      const double x = u(rng), y = u(rng), z = u(rng);
      worst = std::max(worst, std::abs(flow.eval(flow.eval(x, y), z) - flow.eval(x, y + z)));
    }
    verdict(10, worst <= 1e-9, "flow group property: max violation " + fmt("%.2e", worst));
  }

  // 11: Newton-Cotes exactness and change of variables.
  {
    bool exact = true;
    for (int order = 0; order <= 5; ++order) {
      const NCWeights w = nc_weights(order);
      const int top = order == 0 ? 0 : 2 * order - 1;
      for (int p = 0; p <= top; ++p) exact = exact && w.moment(p) == Rational(1, p + 1);
    }
    const Expression f = parse_expression("cos(x)");
    std::vector<double> ns, med;
    for (int n = 512; n <= 8192; n *= 2) {
      const FbmSampler sampler(0.6, n);
      std::vector<double> err;
      for (int i = 0; i < 50; ++i) {
        const FbmPath p = sampler.sample(path_seed(1100, n, i));
        err.push_back(std::abs(nc_functional_sum(f, p, 1) - std::sin(p.endpoint())));
      }
      ns.push_back(n);
      med.push_back(oracle::median(err));
    }
    const DecreaseCheck d = decreasing(ns, med);
    verdict(11, exact && d.pass,
            std::string("Newton-Cotes: exact moments for N <= 5 ") + (exact ? "ok" : "no") +
                "; cos, H=0.6, N=1 [" + d.text + "]");
  }

  // 12: Crank-Nicholson.
  {
    ExperimentConfig cfg = rate_config(0, 0.45);
    cfg.scheme = SchemeSpec::crank_nicholson_scheme();
    const ExperimentReport r = run_rate_experiment(cfg);
    const bool pass = r.fit && r.fit->slope <= -0.70 && r.flags.empty();
    verdict(12, pass, "Crank-Nicholson H=0.45: slope " + fmt("%.3f", r.fit ? r.fit->slope : NAN) + " (<= -0.70)");
  }

  // 13: constant sigma is reproduced exactly.
  {
    double worst = 0.0;
    int configs = 0;
    for (double hurst : {0.3, 0.35, 0.45, 0.5, 0.6, 0.7, 0.9}) {
      for (int m = 0; m <= 12; ++m) {
        if (hurst <= 1.0 / (m + 2)) continue;
        ExperimentConfig cfg = rate_config(m, hurst, {64, 512, 4096}, 20);
        cfg.sigma = "1.5";
        for (const auto& rec : run_rate_experiment(cfg).records) worst = std::max(worst, std::abs(rec.endpoint_error));
        ++configs;
      }
      ExperimentConfig cn = rate_config(0, hurst, {64, 512, 4096}, 20);
      cn.sigma = "1.5";
      cn.scheme = SchemeSpec::crank_nicholson_scheme();
      for (const auto& rec : run_rate_experiment(cn).records) worst = std::max(worst, std::abs(rec.endpoint_error));
      ++configs;
    }
    verdict(13, worst <= 1e-10,
            "constant sigma: max |endpoint error| " + fmt("%.2e", worst) + " over " + std::to_string(configs) +
                " (scheme, H) pairs");
  }

  // 14: determinism.
  {
    bool pass = true;
    std::vector<ExperimentConfig> configs{rate_config(1, 0.45, {256, 512, 1024}, 50),
                                          rate_config(1, 0.5, {256, 512}, 50)};
    configs.push_back(rate_config(0, 0.45, {256, 512, 1024}, 50));
    configs.back().scheme = SchemeSpec::crank_nicholson_scheme();
    for (const auto& cfg : configs) {
      const std::string a = report_to_json(run_rate_experiment(cfg), false);
      const std::string b = report_to_json(run_rate_experiment(cfg), false);
      pass = pass && a == b;
    }
    verdict(14, pass, "determinism: byte-identical reports across repeated runs of 3 configs");
  }

  std::printf("%d of 14 criteria failed; %.1f s\n", failures, seconds_since(suite_start));
  return failures == 0 ? 0 : 1;
}
