#pragma once

#include <string>
#include <vector>

#include "hskdv/config.hpp"

namespace hskdv {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumeric = 3;
inline constexpr int kExitConvergence = 4;

const std::vector<std::string>& subcommands();

// output root: explicit argument, else $HSKDV_OUTPUT_ROOT, else ./runs
std::string output_root(const std::string& explicit_root = "");

// throws module errors; returns the run directory
std::string run_command(const std::string& subcommand, const ExperimentConfig& cfg, const std::string& root);

// catches and maps errors to exit codes, message on stderr
int run(const std::string& subcommand, const ExperimentConfig& cfg, const std::string& root);

} // namespace hskdv
