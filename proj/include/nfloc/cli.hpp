#pragma once

// Experiment dispatch behind the command-line tool.

#include "nfloc/config.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace nfloc {

/// git-describe-style version of this build.
std::string version_string();

/// heatmap, rmse-vs-snr, convergence, rmse-vs-nt, rmse-vs-m, trackmap, selftest.
const std::vector<std::string>& experiment_names();

/// Manifest text: comment header with experiment and version, then every config key.
std::string manifest_text(const std::string& experiment, const ScenarioConfig& config);

/// Runs one experiment into out_dir and writes manifest.cfg next to its CSV.
/// Returns 0 on success, 1 on failure (with a diagnostic on `err` and any
/// files written by this run removed) and 2 for an unknown experiment.
int dispatch(const std::string& experiment, const ScenarioConfig& config,
             const std::filesystem::path& out_dir, std::ostream& log, std::ostream& err);

/// Quick invariant checks; one line per check on `log`. True if all pass.
bool run_selftest(std::ostream& log);

}  // namespace nfloc
