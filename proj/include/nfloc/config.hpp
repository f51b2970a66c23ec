#pragma once

// Flat key = value run configuration. One pair per line, '#' starts a
// comment, unknown keys are rejected and missing keys keep their defaults.
// Angles are in radians and may be written as multiples of pi ("pi/3",
// "0.25*pi"). Lists are comma separated; users are "d:theta" pairs.

#include "nfloc/experiments.hpp"
#include "nfloc/scenario.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace nfloc {

struct ScenarioConfig {
  Scenario scenario;
  ExperimentSettings settings;

  std::vector<Scheme> schemes{{SchemeKind::Random, 0.0},        {SchemeKind::PsOnly, 0.0},
                              {SchemeKind::Optimal, 0.0},       {SchemeKind::Alternating, 0.0},
                              {SchemeKind::SingleCarrier, 0.0}, {SchemeKind::Narrowband, 300e6}};
  std::vector<double> snr_list{-15.0, -10.0, -5.0, 0.0, 5.0};
  std::vector<Index> nt_list{2, 4, 8, 16, 32};
  std::vector<Index> m_list{1, 2, 4, 8, 12, 16, 24};
  std::vector<double> m_snr_list{-5.0, -10.0};
  std::vector<Scheme> m_schemes{{SchemeKind::Random, 0.0},
                                {SchemeKind::PsOnly, 0.0},
                                {SchemeKind::Optimal, 0.0}};
  std::vector<double> priors{0.0, 0.5, 1.0};

  PolarPosition focal{8.0, kPi / 3.0};
  HeatmapArea area;
  double heatmap_resolution = 0.1;
  double heatmap_snr_db = -10.0;
  Index trackmap_trials = 10;

  /// Throws ValidationError naming the first violated invariant.
  void validate() const;
};

/// Error carrying the 1-based line of the offending input.
class ConfigError : public Error {
 public:
  ConfigError(Errc code, Index line, const std::string& what)
      : Error(code, line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  Index line() const noexcept { return line_; }

 private:
  Index line_;
};

ScenarioConfig parse_config_text(const std::string& text);
/// Throws Io if the file cannot be read.
ScenarioConfig parse_config(const std::filesystem::path& path);

/// Every key with its resolved value, in the parseable format.
std::string to_config_text(const ScenarioConfig& config);

/// Names of all accepted keys, in manifest order.
std::vector<std::string> config_keys();

}  // namespace nfloc
