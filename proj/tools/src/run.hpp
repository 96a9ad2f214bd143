#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "run_config.hpp"
#include "table.hpp"

namespace weaknoise::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitCheckFailed = 2;

struct Check {
  std::string name;
  bool passed;
  double value;
  double tolerance;
};

struct CommandResult {
  Table table;
  std::vector<Check> checks;
  nlohmann::json summary = nlohmann::json::object();
};

/// Runs the command without touching the filesystem.
CommandResult execute(const RunConfig& config);

struct RunOutcome {
  int exit_code = kExitOk;
  std::string manifest_path;
  nlohmann::json manifest;
};

/// Executes, writes the data file and <output>.manifest.json. Module errors
/// propagate as weaknoise::Error.
RunOutcome run(const RunConfig& config);

/// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::string& path);

/// Full entry point: parse, run, report. Returns the exit status.
int main_entry(const std::vector<std::string>& args);

}  // namespace weaknoise::cli
