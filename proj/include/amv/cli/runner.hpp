#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "amv/cli/config.hpp"
#include "amv/core/io.hpp"

namespace amv {

/// Exit statuses of `amvlab run`.
inline constexpr int kExitPass = 0;
inline constexpr int kExitToleranceViolation = 1;
inline constexpr int kExitConfigError = 2;
/// A solver or sampler failed outright (no tolerance was evaluated).
inline constexpr int kExitNumericalFailure = 3;

struct ValidationIssue {
  /// offending key, empty when not tied to one
  std::string key;
  std::string message;
  /// warnings are reported but do not block a run
  bool warning = false;

  std::string str() const;
};

/// Checks descriptors, budgets, clearances and Peclet numbers without running
/// anything heavy. No blocking issue iff the config is runnable.
std::vector<ValidationIssue> validate(const ExperimentConfig& config);
bool runnable(const std::vector<ValidationIssue>& issues);

struct Assertion {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct RunOptions {
  /// output directory; default "amvlab_out/<kind>"
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  /// 0 keeps the current worker count
  unsigned workers = 0;
  bool write_files = true;
};

struct RunResult {
  int exit_code = kExitPass;
  std::string out_dir;
  std::vector<Assertion> assertions;
  std::vector<ValidationIssue> issues;
  /// full report.txt content (empty when validation failed)
  std::string report;
  /// CSV name (without directory) and content
  std::vector<std::pair<std::string, std::string>> csvs;
  /// error text for exit codes 2 and 3
  std::string message;
};

RunResult run(ExperimentConfig config, const RunOptions& options = {});
/// Loads the file first; unreadable or malformed files give exit code 2.
RunResult run_file(const std::string& path, const RunOptions& options = {});

/// Lines printed by `amvlab list-catalogs`.
std::vector<std::string> catalog_listing();

}  // namespace amv
