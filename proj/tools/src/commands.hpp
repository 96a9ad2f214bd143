#pragma once

#include "run.hpp"

namespace weaknoise::cli {

CommandResult run_fig1(const RunConfig& c);
CommandResult run_spectrum(const RunConfig& c);
CommandResult run_fdt_check(const RunConfig& c);
CommandResult run_pfunction(const RunConfig& c);
CommandResult run_tls_variance(const RunConfig& c);
CommandResult run_povm_converge(const RunConfig& c);
CommandResult run_calibrate_kernel(const RunConfig& c);

}  // namespace weaknoise::cli
