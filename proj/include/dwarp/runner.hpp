#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "dwarp/config.hpp"

namespace dwarp {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr int kSummarySchemaVersion = 1;

enum class Status { Pass, Fail, Error };
std::string to_string(Status s);

struct ExperimentOutcome {
  std::string name;
  ExperimentKind kind = ExperimentKind::PotentialBound;
  Status status = Status::Error;
  std::string error;
  std::filesystem::path csv;  // ends in .partial after an error
  std::vector<Check> checks;
  std::map<std::string, Real> headline;
  double wall_time_s = 0;
};

struct RunSummary {
  std::vector<ExperimentOutcome> experiments;  // config order
  bool all_passed = true;
  double wall_time_s = 0;
  std::filesystem::path summary_path;
};

/// Runs every experiment on up to `threads` workers, writes `<name>.csv`
/// and `summary.json` into `output_dir`. Experiments themselves are
/// sequential, so CSV bytes do not depend on `threads`.
RunSummary run_config(const RunConfig& cfg, const std::filesystem::path& output_dir, int threads = 1,
                      std::ostream* log = nullptr);

}  // namespace dwarp
