#pragma once

#include <array>
#include <string_view>

#include "config.hpp"

namespace nlflat::cli {

inline constexpr std::array<std::string_view, 6> kCommands{
    "simulate", "verify-subsolution", "verify-flattening", "verify-proposition", "reference-compare", "bench"};

enum ExitCode : int {
  kExitOk = 0,
  kExitCheckFailed = 1,
  kExitConfigError = 2,
  kExitInternalError = 3,
};

/// Runs one subcommand and writes its artifacts under cfg.output_dir.
/// Returns kExitOk or kExitCheckFailed; errors propagate as exceptions.
int run(std::string_view command, const RunConfig& cfg);

}  // namespace nlflat::cli
