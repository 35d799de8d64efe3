#pragma once

#include <string>
#include <vector>

#include "perifront/linalg.hpp"

namespace perifront {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Runs one task from a declarative JSON config. Writes manifest.json,
/// result.json and the task's CSV artifacts into the output directory.
/// Returns the process exit status (nonzero iff an asserted property of the
/// task's report fails). out_override, when nonempty, replaces the config's
/// output_dir; the PERIFRONT_OUT environment variable overrides both.
int run_task(const std::string& task, const std::string& config_path,
             const std::string& out_override = "", int jobs = 1);

/// Cross-method comparison table from >= 2 result.json files of
/// speed-bearing tasks; prints the pairwise relative-gap matrix.
int run_compare(const std::vector<std::string>& result_paths);

const char* tool_version();

}  // namespace perifront
