#pragma once

#include <iosfwd>
#include <string>

#include "fsde/mc.hpp"

namespace fsde::cli {

/// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kRuntimeFailure = 1;
inline constexpr int kConfigError = 2;

/// Everything a config file can set. See docs/config.md.
struct RunConfig {
  ExperimentConfig experiment;
  std::string weight = "1";   // powervar weight h
  int kappa = 2;              // powervar exponent
  bool weight_on_flow = false;
  int order = 1;              // ncweights N
};

/// Parses a YAML mapping. Unknown keys and ill-typed values throw ConfigError.
RunConfig parse_config(const std::string& text);
/// Reads and parses a config file; a missing file throws ConfigError naming it.
RunConfig load_config(const std::string& path);

/// Entry point shared by the executable and the tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fsde::cli
