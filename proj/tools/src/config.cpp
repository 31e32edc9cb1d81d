#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "fsde_cli/cli.hpp"

namespace fsde::cli {

namespace {

const std::set<std::string> kKeys{
    "sigma", "x0",     "hurst",  "scheme", "m",      "n",     "paths",        "seed",
    "method", "bounded", "threads", "weight", "kappa", "order", "weight_on_flow", "ks_alpha",
    "flow_tolerance", "fixed_point_tolerance", "max_iterations"};

template <class T>
T get(const YAML::Node& node, const std::string& key) {
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError("config key '" + key + "': value of the wrong type");
  }
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  RunConfig rc;
  if (root.IsNull()) return rc;
  if (!root.IsMap()) throw ConfigError("config: top level must be a key: value mapping");

  ExperimentConfig& cfg = rc.experiment;
  for (const auto& item : root) {
    const auto key = item.first.as<std::string>();
    if (!kKeys.count(key)) throw ConfigError("config: unknown key '" + key + "'");
    const YAML::Node& v = item.second;
    if (key == "sigma") {
      cfg.sigma = get<std::string>(v, key);
    } else if (key == "x0") {
      cfg.x0 = get<double>(v, key);
    } else if (key == "hurst") {
      cfg.hurst = get<double>(v, key);
    } else if (key == "scheme") {
      try {
        cfg.scheme.kind = parse_scheme_kind(get<std::string>(v, key));
      } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config key 'scheme': ") + e.what());
      }
    } else if (key == "m") {
      cfg.scheme.size = get<int>(v, key);
    } else if (key == "n") {
      if (v.IsSequence()) {
        cfg.n_list = get<std::vector<int>>(v, key);
      } else {
        cfg.n_list = {get<int>(v, key)};
      }
    } else if (key == "paths") {
      cfg.paths = get<int>(v, key);
    } else if (key == "seed") {
      cfg.seed = get<std::uint64_t>(v, key);
    } else if (key == "method") {
      try {
        cfg.method = parse_sampling_method(get<std::string>(v, key));
      } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config key 'method': ") + e.what());
      }
    } else if (key == "bounded") {
      cfg.bounded = get<bool>(v, key);
    } else if (key == "threads") {
      cfg.threads = get<int>(v, key);
    } else if (key == "ks_alpha") {
      cfg.ks_alpha = get<double>(v, key);
    } else if (key == "flow_tolerance") {
      const double tol = get<double>(v, key);
      cfg.tolerance = FlowTolerance{tol, tol};
    } else if (key == "fixed_point_tolerance") {
      cfg.scheme.fixed_point_tolerance = get<double>(v, key);
    } else if (key == "max_iterations") {
      cfg.scheme.max_iterations = get<int>(v, key);
    } else if (key == "weight") {
      rc.weight = get<std::string>(v, key);
    } else if (key == "kappa") {
      rc.kappa = get<int>(v, key);
    } else if (key == "order") {
      rc.order = get<int>(v, key);
    } else if (key == "weight_on_flow") {
      rc.weight_on_flow = get<bool>(v, key);
    }
  }
  if (cfg.scheme.kind == SchemeKind::crank_nicholson) cfg.scheme.size = 0;
  return rc;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

}  // namespace fsde::cli
