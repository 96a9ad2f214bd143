#pragma once

// Run configuration shared by the flag parser and JSON config files. Every
// command declares its parameters with types and defaults; anything not
// declared is rejected.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "table.hpp"

namespace weaknoise::cli {

inline constexpr std::uint64_t kDefaultSeed = 20130101;

/// Bad flags, unknown keys, unknown commands. Maps to exit status 1.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ParamKind { Real, Integer, Text };

struct ParamSpec {
  std::string name;
  ParamKind kind;
  nlohmann::json fallback;
  std::string help;
};

struct CommandSpec {
  std::string name;
  std::string help;
  std::vector<ParamSpec> params;
};

const std::vector<CommandSpec>& commands();
const CommandSpec& command_spec(const std::string& name);

struct RunConfig {
  std::string command;
  nlohmann::json parameters = nlohmann::json::object();  // complete after resolve()
  std::string output;                                    // data file; default <command>.<format>
  std::uint64_t seed = kDefaultSeed;
  Format format = Format::Csv;
  int threads = 1;

  double real(const std::string& key) const;
  long integer(const std::string& key) const;
  std::string text(const std::string& key) const;
};

/// Fills defaults and checks every key and type against the command spec.
RunConfig resolve(RunConfig config);

/// Parses {"command", "parameters", "output", "seed", "format", "threads"}.
/// Unknown keys at either level are errors.
RunConfig config_from_json(const nlohmann::json& j);

/// Echo for the manifest.
nlohmann::json config_to_json(const RunConfig& config);

/// argv without the program name. "--config file.json" loads a base config;
/// explicit flags override it.
RunConfig parse_arguments(const std::vector<std::string>& args);

std::string usage();

}  // namespace weaknoise::cli
