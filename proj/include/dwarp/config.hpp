#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "dwarp/experiments.hpp"

namespace dwarp {

struct ConfigIssue {
  std::string path;  // e.g. "experiments[0].params.pairs[1]"
  std::string message;
};

/// Every problem found in a config, not just the first.
struct ConfigError : ConfigurationError {
  explicit ConfigError(std::vector<ConfigIssue> issues);
  std::vector<ConfigIssue> issues;
};

struct RunConfig {
  std::vector<ExperimentSpec> experiments;
  std::uint64_t seed = 0;
  std::string output_dir = "results";
  std::string echo;  // the parsed config as compact JSON
};

/// YAML (canonical) or JSON text. Unknown keys are errors; per-experiment
/// warp, grid and evolution sections override the top-level ones.
/// Throws ConfigError.
RunConfig parse_config(const std::string& text);

/// Reads and parses a file; throws ConfigError (unreadable file included).
RunConfig load_config(const std::filesystem::path& path);

/// Replaces the seed of the run and of every experiment.
void override_seed(RunConfig& cfg, std::uint64_t seed);

}  // namespace dwarp
