#include "run.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "commands.hpp"
#include "weaknoise/error.hpp"

namespace weaknoise::cli {

namespace {

constexpr const char* kArtifactVersion = "weaknoise 0.3.0";

}  // namespace

CommandResult execute(const RunConfig& config) {
  const RunConfig c = resolve(config);
  if (c.command == "fig1") return run_fig1(c);
  if (c.command == "spectrum") return run_spectrum(c);
  if (c.command == "fdt-check") return run_fdt_check(c);
  if (c.command == "pfunction") return run_pfunction(c);
  if (c.command == "tls-variance") return run_tls_variance(c);
  if (c.command == "povm-converge") return run_povm_converge(c);
  if (c.command == "calibrate-kernel") return run_calibrate_kernel(c);
  throw UsageError("unknown command '" + c.command + "'");
}

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buf[1 << 14];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return hex.str();
}

RunOutcome run(const RunConfig& config) {
  const RunConfig c = resolve(config);
  const auto start = std::chrono::steady_clock::now();
  const CommandResult result = execute(c);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_table(c.output, result.table, c.format);

  RunOutcome out;
  nlohmann::json checks = nlohmann::json::array();
  bool all = true;
  for (const Check& ch : result.checks) {
    checks.push_back({{"name", ch.name}, {"passed", ch.passed}, {"value", ch.value}, {"tolerance", ch.tolerance}});
    all = all && ch.passed;
  }
  out.manifest = {{"artifact_version", kArtifactVersion},
                  {"config", config_to_json(c)},
                  {"wall_time_s", wall},
                  {"checks", checks},
                  {"summary", result.summary},
                  {"outputs", {{{"path", c.output}, {"sha256", sha256_file(c.output)}}}}};
  out.exit_code = all ? kExitOk : kExitCheckFailed;
  out.manifest_path = c.output + ".manifest.json";
  std::ofstream m(out.manifest_path);
  if (!m) throw std::runtime_error("cannot write '" + out.manifest_path + "'");
  m << out.manifest.dump(2) << "\n";
  return out;
}

int main_entry(const std::vector<std::string>& args) {
  if (args.empty() || args[0] == "--help" || args[0] == "-h" || args[0] == "help") {
    std::cout << usage();
    return args.empty() ? kExitUsage : kExitOk;
  }
  try {
    const RunConfig config = parse_arguments(args);
    const RunOutcome out = run(config);
    for (const auto& ch : out.manifest["checks"]) {
      std::printf("%s %s value=%.6g tol=%.3g\n", ch["passed"].get<bool>() ? "PASS" : "FAIL",
                  ch["name"].get<std::string>().c_str(), ch["value"].get<double>(), ch["tolerance"].get<double>());
    }
    if (!out.manifest["summary"].empty()) std::printf("summary %s\n", out.manifest["summary"].dump().c_str());
    std::printf("wrote %s and %s\n", config.output.c_str(), out.manifest_path.c_str());
    return out.exit_code;
  } catch (const UsageError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kExitUsage;
  } catch (const weaknoise::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  }
}

}  // namespace weaknoise::cli
