#include "run_config.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <map>
#include <sstream>

namespace weaknoise::cli {

namespace {

ParamSpec real(std::string name, double fallback, std::string help) {
  return {std::move(name), ParamKind::Real, fallback, std::move(help)};
}
ParamSpec integer(std::string name, long fallback, std::string help) {
  return {std::move(name), ParamKind::Integer, fallback, std::move(help)};
}
ParamSpec text(std::string name, std::string fallback, std::string help) {
  return {std::move(name), ParamKind::Text, std::move(fallback), std::move(help)};
}

std::vector<CommandSpec> build_commands() {
  return {
      {"fig1",
       "Emission and symmetrized noise of an AC-driven junction versus drive amplitude, T = T_d = 0",
       {real("z-max", 4.0, "largest drive amplitude z = eV_ac/hbar Omega"),
        integer("steps", 400, "grid intervals on [0, z-max]"),
        integer("cutoff", 0, "Bessel sideband cutoff, 0 = automatic"),
        real("tolerance", 1e-8, "bisection tolerance for the violation interval"),
        real("scan-step", 0.01, "coarse scan step for the violation interval"),
        real("scan-max", 10.0, "coarse scan range")}},
      {"spectrum",
       "Lehmann spectrum and weak-measurement spectrum of a thermal system",
       {text("system", "tls", "tls, osc or three-level"),
        real("T", 1.0, "system temperature in units of Omega"),
        real("Td", 1.0, "detector temperature"),
        text("kernel", "equilibrium", "equilibrium, absorption or markovian"),
        text("pair", "xx", "observable letters: x y z (tls), x p (osc), a b (three-level)"),
        integer("dim", 32, "Fock truncation for osc")}},
      {"fdt-check",
       "Fluctuation-dissipation residuals on every spectral line",
       {text("system", "tls", "tls, osc or three-level"),
        real("T", 1.0, "temperature in units of Omega"),
        text("pair", "xx", "observable letters"),
        integer("dim", 32, "Fock truncation for osc")}},
      {"pfunction",
       "Weak photodetection moments against P and Q quasiprobability moments",
       {text("state", "squeezed", "coherent, thermal or squeezed"),
        real("beta", 1.0, "coherent amplitude, real part"),
        real("beta-im", 0.0, "coherent amplitude, imaginary part"),
        real("nbar", 1.0, "thermal occupation"),
        real("r", 0.5, "squeezing parameter"),
        integer("dim", 64, "Fock truncation"),
        integer("max-order", 4, "largest word length n + k")}},
      {"tls-variance",
       "Equal-time weak variance of sigma_x + sigma_z with memory cutoff t_inf",
       {real("omega-tinf", 100.0, "largest Omega t_inf"),
        integer("points", 1, "log-spaced points from Omega t_inf = 1; 1 = single value")}},
      {"povm-converge",
       "Finite-coupling Gaussian POVM correlator versus coupling eta",
       {text("case", "xx-ground", "xx-ground, xz-plus or yx-thermal"),
        text("etas", "0.1,0.05,0.025", "comma-separated couplings, each half the previous"),
        integer("samples", 100000, "Monte Carlo samples per coupling"),
        real("dt", 0.04, "time step"),
        integer("grid-points", 128, "detector grid points"),
        integer("upsample", 4, "outcome grid refinement")}},
      {"calibrate-kernel",
       "Recover the equilibrium-order kernel from the zero-signal condition",
       {real("omega", 1.0, "probe frequency"),
        real("T", 1.0, "temperature"),
        integer("pairs", 0, "if > 0, a fixed log grid of (Omega, T) pairs instead")}},
  };
}

nlohmann::json coerce(const ParamSpec& spec, const nlohmann::json& value, const std::string& command) {
  const std::string where = command + ": parameter '" + spec.name + "'";
  switch (spec.kind) {
    case ParamKind::Real:
      if (!value.is_number()) throw UsageError(where + " must be a number");
      return value.get<double>();
    case ParamKind::Integer:
      if (!value.is_number_integer()) throw UsageError(where + " must be an integer");
      return value.get<long>();
    case ParamKind::Text:
      if (!value.is_string()) throw UsageError(where + " must be a string");
      return value;
  }
  return value;
}

nlohmann::json from_flag(const ParamSpec& spec, const std::string& raw, const std::string& command) {
  try {
    std::size_t used = 0;
    switch (spec.kind) {
      case ParamKind::Real: {
        const double v = std::stod(raw, &used);
        if (used != raw.size()) break;
        return v;
      }
      case ParamKind::Integer: {
        const long v = std::stol(raw, &used);
        if (used != raw.size()) break;
        return v;
      }
      case ParamKind::Text: return raw;
    }
  } catch (const std::exception&) {
  }
  throw UsageError(command + ": --" + spec.name + " cannot take '" + raw + "'");
}

}  // namespace

const std::vector<CommandSpec>& commands() {
  static const std::vector<CommandSpec> all = build_commands();
  return all;
}

const CommandSpec& command_spec(const std::string& name) {
  for (const CommandSpec& c : commands()) {
    if (c.name == name) return c;
  }
  throw UsageError("unknown command '" + name + "'");
}

double RunConfig::real(const std::string& key) const { return parameters.at(key).get<double>(); }
long RunConfig::integer(const std::string& key) const { return parameters.at(key).get<long>(); }
std::string RunConfig::text(const std::string& key) const { return parameters.at(key).get<std::string>(); }

RunConfig resolve(RunConfig config) {
  const CommandSpec& spec = command_spec(config.command);
  if (!config.parameters.is_object()) throw UsageError("parameters must be an object");
  for (const auto& [key, value] : config.parameters.items()) {
    bool known = false;
    for (const ParamSpec& p : spec.params) known = known || p.name == key;
    if (!known) throw UsageError(spec.name + ": unknown parameter '" + key + "'");
  }
  nlohmann::json full = nlohmann::json::object();
  for (const ParamSpec& p : spec.params) {
    full[p.name] = config.parameters.contains(p.name) ? coerce(p, config.parameters[p.name], spec.name) : p.fallback;
  }
  config.parameters = std::move(full);
  if (config.output.empty()) config.output = config.command + "." + to_string(config.format);
  if (config.threads < 1) throw UsageError("threads must be >= 1");
  return config;
}

RunConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw UsageError("config must be a JSON object");
  RunConfig c;
  for (const auto& [key, value] : j.items()) {
    if (key == "command") {
      c.command = value.get<std::string>();
    } else if (key == "parameters") {
      c.parameters = value;
    } else if (key == "output") {
      c.output = value.get<std::string>();
    } else if (key == "seed") {
      if (!value.is_number_unsigned()) throw UsageError("seed must be a non-negative integer");
      c.seed = value.get<std::uint64_t>();
    } else if (key == "format") {
      try {
        c.format = format_from_string(value.get<std::string>());
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
    } else if (key == "threads") {
      c.threads = value.get<int>();
    } else {
      throw UsageError("unknown config key '" + key + "'");
    }
  }
  return c;
}

nlohmann::json config_to_json(const RunConfig& config) {
  return {{"command", config.command},
          {"parameters", config.parameters},
          {"output", config.output},
          {"seed", config.seed},
          {"format", to_string(config.format)},
          {"threads", config.threads}};
}

RunConfig parse_arguments(const std::vector<std::string>& args) {
  CLI::App app{"weaknoise: weak-measurement noise correlators"};
  app.set_help_flag();
  app.require_subcommand(1);
  app.allow_windows_style_options(false);

  std::string config_path, output, format;
  std::uint64_t seed = 0;
  int threads = 1;
  auto* opt_config = app.add_option("--config", config_path, "JSON config file; flags override it");
  auto* opt_output = app.add_option("--output,-o", output, "data file path");
  auto* opt_seed = app.add_option("--seed", seed, "random seed");
  auto* opt_format = app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  auto* opt_threads = app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);

  std::map<std::string, std::map<std::string, std::string>> raw;
  std::map<std::string, CLI::App*> subs;
  for (const CommandSpec& c : commands()) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    sub->fallthrough();
    subs[c.name] = sub;
    for (const ParamSpec& p : c.params) sub->add_option("--" + p.name, raw[c.name][p.name], p.help);
  }

  if (!args.empty() && args[0].rfind("-", 0) != 0) command_spec(args[0]);
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  RunConfig c;
  if (opt_config->count() > 0) {
    std::ifstream in(config_path);
    if (!in) throw UsageError("cannot read config '" + config_path + "'");
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw UsageError("config '" + config_path + "': " + e.what());
    }
    c = config_from_json(j);
  }
  std::string chosen;
  for (const auto& [name, sub] : subs) {
    if (sub->parsed()) chosen = name;
  }
  if (!c.command.empty() && c.command != chosen) {
    throw UsageError("config is for '" + c.command + "' but the command line asks for '" + chosen + "'");
  }
  c.command = chosen;
  const CommandSpec& spec = command_spec(chosen);
  if (!c.parameters.is_object()) throw UsageError("parameters must be an object");
  for (const ParamSpec& p : spec.params) {
    if (subs[chosen]->get_option("--" + p.name)->count() > 0) c.parameters[p.name] = from_flag(p, raw[chosen][p.name], chosen);
  }
  if (opt_output->count() > 0) c.output = output;
  if (opt_seed->count() > 0) c.seed = seed;
  if (opt_format->count() > 0) c.format = format_from_string(format);
  if (opt_threads->count() > 0) c.threads = threads;
  return resolve(std::move(c));
}

std::string usage() {
  std::ostringstream out;
  out << "usage: weaknoise <command> [--param value ...] [--config file.json] [--output path]\n"
      << "                 [--format csv|json] [--seed n] [--threads n]\n\ncommands:\n";
  for (const CommandSpec& c : commands()) {
    out << "  " << c.name << "  " << c.help << "\n";
    for (const ParamSpec& p : c.params) out << "      --" << p.name << " (default " << p.fallback.dump() << ")  " << p.help << "\n";
  }
  return out.str();
}

}  // namespace weaknoise::cli
