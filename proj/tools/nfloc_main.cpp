// nfloc: run one localization experiment and write its CSV and manifest.

#include "nfloc/cli.hpp"
#include "nfloc/config.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cstdlib>
#include <iostream>
#include <string>

namespace {

std::string usage_names() {
  std::string out;
  for (const auto& n : nfloc::experiment_names()) out += (out.empty() ? "" : ", ") + n;
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Near-field wideband multi-user localization with a TTD hybrid array"};
  app.set_version_flag("--version", nfloc::version_string());

  std::string config_path;
  std::string out_dir = "out";
  std::string experiment;
  std::uint64_t seed = 0;
  nfloc::Index trials = 0;
  unsigned jobs = 0;
  app.add_option("--experiment", experiment, "one of: " + usage_names())->required();
  app.add_option("--config", config_path, "key = value configuration file")
      ->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "output directory")->capture_default_str();
  auto* seed_opt = app.add_option("--seed", seed, "master seed (NFLOC_SEED overrides)");
  auto* trials_opt = app.add_option("--trials", trials, "Monte Carlo trials per sweep point")
                         ->check(CLI::PositiveNumber);
  app.add_option("--jobs", jobs, "worker threads (0 = all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  nfloc::ScenarioConfig config;
  try {
    if (!config_path.empty()) config = nfloc::parse_config(config_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  if (*seed_opt) config.settings.seed = seed;
  if (const char* env = std::getenv("NFLOC_SEED"); env && *env) {
    const std::string text(env);
    std::uint64_t v = 0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || end != text.data() + text.size()) {
      std::cerr << "error: NFLOC_SEED is not an unsigned 64-bit integer: '" << text << "'\n";
      return 1;
    }
    config.settings.seed = v;
  }
  if (*trials_opt) config.settings.trials = trials;
  config.settings.jobs = jobs;

  const int status = nfloc::dispatch(experiment, config, out_dir, std::cout, std::cerr);
  if (status == 2) std::cerr << app.help();
  return status;
}
