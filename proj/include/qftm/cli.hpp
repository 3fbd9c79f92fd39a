#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace qftm {

struct RunOptions {
  /// Overrides the config seed.
  std::optional<std::uint64_t> seed;
  bool parallel = false;
  double tolerance_scale = 1.0;
};

/// Subcommands: green, sorkin, scatter, measure, causal, verify.
/// Writes <sub>_checks.csv, <sub>_summary.json and any data tables into out_dir.
/// Returns 0 when every check passes, 1 when one fails, 2 on a configuration
/// or geometry error. The summary is written in all three cases.
int run(const std::string& config_path, const std::string& subcommand, const std::string& out_dir,
        const RunOptions& options, std::ostream& log);

}  // namespace qftm
