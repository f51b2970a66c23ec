#include "nfloc/cli.hpp"

#include "nfloc/csv.hpp"

#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#ifndef NFLOC_VERSION
#define NFLOC_VERSION "0.1.0"
#endif

namespace nfloc {

namespace fs = std::filesystem;

std::string version_string() { return NFLOC_VERSION; }

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"heatmap",    "rmse-vs-snr", "convergence",
                                              "rmse-vs-nt", "rmse-vs-m",   "trackmap",
                                              "selftest"};
  return names;
}

std::string manifest_text(const std::string& experiment, const ScenarioConfig& config) {
  return "# nfloc run manifest\n# experiment: " + experiment + "\n# version: " + version_string() +
         "\n" + to_config_text(config);
}

namespace {

// Files written by one dispatch; removed again unless committed.
class OutputSet {
 public:
  explicit OutputSet(fs::path dir) : dir_(std::move(dir)) {
    if (!fs::exists(dir_)) {
      fs::create_directories(dir_);
      created_dir_ = true;
    }
  }
  OutputSet(const OutputSet&) = delete;
  OutputSet& operator=(const OutputSet&) = delete;
  ~OutputSet() {
    if (committed_) return;
    std::error_code ec;
    for (const fs::path& p : files_) fs::remove(p, ec);
    if (created_dir_ && fs::is_empty(dir_, ec)) fs::remove(dir_, ec);
  }

  void write(const std::string& name, const std::function<void(std::ostream&)>& body) {
    const fs::path path = dir_ / name;
    files_.push_back(path);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::Io, "cannot write '" + path.string() + "'");
    body(out);
    out.flush();
    if (!out) throw Error(Errc::Io, "write failed for '" + path.string() + "'");
  }

  void commit() { committed_ = true; }

 private:
  fs::path dir_;
  std::vector<fs::path> files_;
  bool created_dir_ = false;
  bool committed_ = false;
};

}  // namespace

int dispatch(const std::string& experiment, const ScenarioConfig& config, const fs::path& out_dir,
             std::ostream& log, std::ostream& err) {
  const auto& names = experiment_names();
  if (std::find(names.begin(), names.end(), experiment) == names.end()) {
    err << "unknown experiment '" << experiment << "'\n";
    return 2;
  }
  try {
    config.validate();
    OutputSet out(out_dir);
    const Scenario& sc = config.scenario;
    const ExperimentSettings& st = config.settings;

    if (experiment == "heatmap") {
      const HeatmapRun run = run_heatmap(sc, config.focal, config.area, config.heatmap_resolution,
                                         config.heatmap_snr_db, st);
      out.write("heatmap.csv", [&](std::ostream& o) { write_csv(o, run.map); });
      out.write("heatmap_meta.cfg", [&](std::ostream& o) {
        o << "focal_d = " << format_number(run.focal.d) << "\n"
          << "focal_theta = " << format_number(run.focal.theta) << "\n"
          << "array_row = " << run.map.array_row << "\n"
          << "array_col = " << run.map.array_col << "\n";
      });
      log << "heatmap: " << run.map.cells() << " cells\n";
    } else if (experiment == "rmse-vs-snr") {
      const auto rows = run_rmse_vs_snr(sc, config.schemes, config.snr_list, st);
      out.write("rmse_vs_snr.csv", [&](std::ostream& o) { write_csv(o, rows); });
      for (const auto& r : rows) {
        log << r.snr_db << " dB " << r.scheme << ": rmse " << r.stats.rmse << " m, median "
            << r.stats.median_error << " m, crb " << r.stats.crb << " m\n";
      }
    } else if (experiment == "convergence") {
      const auto rows = run_convergence(sc, config.priors, st);
      out.write("convergence.csv", [&](std::ostream& o) { write_csv(o, rows); });
      log << "convergence: " << rows.size() << " rows\n";
    } else if (experiment == "rmse-vs-nt") {
      const auto rows = run_rmse_vs_nt(sc, config.nt_list, st);
      out.write("rmse_vs_nt.csv", [&](std::ostream& o) { write_csv(o, rows); });
      for (const auto& r : rows) {
        log << "N_t " << r.n_t << ' ' << r.scheme << ": rmse " << r.stats.rmse << " m, median "
            << r.stats.median_error << " m\n";
      }
    } else if (experiment == "rmse-vs-m") {
      const auto rows = run_rmse_vs_m(sc, config.m_list, config.m_snr_list, config.m_schemes, st);
      out.write("rmse_vs_m.csv", [&](std::ostream& o) { write_csv(o, rows); });
      for (const auto& r : rows) {
        log << "M " << r.m << ' ' << r.snr_db << " dB " << r.scheme << ": rmse " << r.stats.rmse
            << " m, median " << r.stats.median_error << " m\n";
      }
    } else if (experiment == "trackmap") {
      ExperimentSettings track = st;
      track.trials = config.trackmap_trials;
      const auto rows = run_trackmap(sc, track);
      out.write("trackmap.csv", [&](std::ostream& o) { write_csv(o, rows); });
      log << "trackmap: " << rows.size() << " rows\n";
    } else {
      std::ostringstream report;
      const bool ok = run_selftest(report);
      log << report.str();
      out.write("selftest.txt", [&](std::ostream& o) { o << report.str(); });
      if (!ok) throw Error(Errc::InvalidArgument, "selftest failed");
    }
    out.write("manifest.cfg", [&](std::ostream& o) { o << manifest_text(experiment, config); });
    out.commit();
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace nfloc
