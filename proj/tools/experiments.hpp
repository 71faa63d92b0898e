#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "config.hpp"

namespace eatool {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitCounterexample = 4;

struct RunContext {
  std::string experiment;
  Config cfg;
  std::filesystem::path out;
  int threads = 1;
  std::vector<std::string> artifacts;
  int status = kExitOk;
};

const std::vector<std::string>& experiment_names();

/// Runs one experiment, writes its artifacts and metadata.json into ctx.out.
/// Throws ConfigError / IoError; returns the exit status.
int run_experiment(RunContext& ctx);

/// Re-runs the experiment recorded in a metadata file and compares outputs.
/// With an unchanged seed the artifacts must match byte for byte; with a
/// different seed, tabulated estimates must agree within 6 standard errors.
int replay(const std::filesystem::path& metadata, const std::filesystem::path& out, int threads,
           const std::string& seed_override);

std::string tool_version();

}  // namespace eatool
