#include "nfloc/config.hpp"

#include "nfloc/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace nfloc {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

[[noreturn]] void bad(const std::string& what) { throw Error(Errc::InvalidArgument, what); }

// A real literal, or [a*]pi[/b].
double real_value(const std::string& s) {
  const auto at = s.find("pi");
  if (at == std::string::npos) return parse_number(s);
  std::string head = trim(s.substr(0, at));
  std::string tail = trim(s.substr(at + 2));
  double scale = 1.0;
  if (!head.empty()) {
    if (head == "-") {
      scale = -1.0;
    } else {
      if (head.back() != '*') bad("malformed multiple of pi: '" + s + "'");
      head.pop_back();
      scale = parse_number(trim(head));
    }
  }
  double divisor = 1.0;
  if (!tail.empty()) {
    if (tail.front() != '/') bad("malformed multiple of pi: '" + s + "'");
    divisor = parse_number(trim(tail.substr(1)));
    if (divisor == 0.0) bad("division by zero in '" + s + "'");
  }
  return scale * kPi / divisor;
}

Index index_value(const std::string& s) {
  long long v = 0;
  const char* first = s.data();
  const char* last = first + s.size();
  const auto [end, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || end != last || first == last) bad("not an integer: '" + s + "'");
  return static_cast<Index>(v);
}

std::uint64_t seed_value(const std::string& s) {
  std::uint64_t v = 0;
  const char* first = s.data();
  const char* last = first + s.size();
  const auto [end, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || end != last || first == last) bad("not an unsigned 64-bit seed: '" + s + "'");
  return v;
}

template <typename T, typename Fn>
std::vector<T> list_value(const std::string& s, Fn&& item) {
  std::vector<T> out;
  if (trim(s).empty()) return out;
  for (const std::string& part : split(s, ',')) {
    if (part.empty()) bad("empty list item in '" + s + "'");
    out.push_back(item(part));
  }
  return out;
}

template <typename T, typename Fn>
std::string join(const std::vector<T>& v, Fn&& item) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += item(v[i]);
  }
  return out;
}

std::string idx(Index v) { return std::to_string(v); }
std::string num(double v) { return format_number(v); }

struct Field {
  const char* key;
  std::function<void(ScenarioConfig&, const std::string&)> set;
  std::function<std::string(const ScenarioConfig&)> get;
};

#define NFLOC_REAL(KEY, MEMBER)                                                   \
  Field {                                                                         \
    KEY, [](ScenarioConfig& c, const std::string& v) { c.MEMBER = real_value(v); }, \
        [](const ScenarioConfig& c) { return num(c.MEMBER); }                     \
  }
#define NFLOC_INDEX(KEY, MEMBER)                                                   \
  Field {                                                                          \
    KEY, [](ScenarioConfig& c, const std::string& v) { c.MEMBER = index_value(v); }, \
        [](const ScenarioConfig& c) { return idx(c.MEMBER); }                      \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> table{
      NFLOC_REAL("f_c", scenario.carrier),
      NFLOC_REAL("b", scenario.bandwidth),
      NFLOC_INDEX("m", scenario.subcarriers),
      NFLOC_INDEX("l", scenario.snapshots),
      NFLOC_INDEX("n", scenario.antennas),
      NFLOC_INDEX("n_d", scenario.rf_chains),
      NFLOC_INDEX("n_t", scenario.ttds_per_chain),
      NFLOC_REAL("delta", scenario.spacing),
      NFLOC_REAL("t_max", scenario.t_max),
      NFLOC_INDEX("delay_grid", scenario.delay_grid_points),
      NFLOC_REAL("snr_db", scenario.snr_db),
      Field{"users",
            [](ScenarioConfig& c, const std::string& v) {
              c.scenario.users = list_value<PolarPosition>(v, [](const std::string& p) {
                const auto parts = split(p, ':');
                if (parts.size() != 2) bad("user must be written d:theta, got '" + p + "'");
                return PolarPosition{real_value(parts[0]), real_value(parts[1])};
              });
            },
            [](const ScenarioConfig& c) {
              return join(c.scenario.users,
                          [](const PolarPosition& p) { return num(p.d) + ":" + num(p.theta); });
            }},
      Field{"seed", [](ScenarioConfig& c, const std::string& v) { c.settings.seed = seed_value(v); },
            [](const ScenarioConfig& c) { return std::to_string(c.settings.seed); }},
      NFLOC_INDEX("trials", settings.trials),
      NFLOC_INDEX("ap_sweeps", settings.ap_sweeps),
      NFLOC_INDEX("joint_iterations", settings.joint_iterations),
      NFLOC_REAL("grid_d_min", settings.grid.d_min),
      NFLOC_REAL("grid_d_max", settings.grid.d_max),
      NFLOC_REAL("grid_theta_min", settings.grid.theta_min),
      NFLOC_REAL("grid_theta_max", settings.grid.theta_max),
      NFLOC_INDEX("grid_coarse_d", settings.grid.coarse_d),
      NFLOC_INDEX("grid_coarse_theta", settings.grid.coarse_theta),
      NFLOC_INDEX("grid_refine_d", settings.grid.refine_d),
      NFLOC_INDEX("grid_refine_theta", settings.grid.refine_theta),
      NFLOC_INDEX("grid_levels", settings.grid.levels),
      NFLOC_INDEX("grid_starts", settings.grid.starts),
      NFLOC_REAL("grid_refine_span", settings.grid.refine_span),
      NFLOC_REAL("grid_polish_tol", settings.grid.polish_tol),
      NFLOC_INDEX("grid_polish_evaluations", settings.grid.polish_evaluations),
      Field{"design_form",
            [](ScenarioConfig& c, const std::string& v) {
              if (v == "surrogate") {
                c.settings.form = DesignForm::Surrogate;
              } else if (v == "exact_trace") {
                c.settings.form = DesignForm::ExactTrace;
              } else {
                bad("design_form must be surrogate or exact_trace");
              }
            },
            [](const ScenarioConfig& c) {
              return std::string(c.settings.form == DesignForm::Surrogate ? "surrogate" : "exact_trace");
            }},
      NFLOC_INDEX("design_outer_iters", settings.design.outer_iters),
      NFLOC_REAL("design_tol", settings.design.tol),
      NFLOC_INDEX("rcg_max_iters", settings.design.phases.max_iters),
      NFLOC_REAL("rcg_tol", settings.design.phases.tol),
      NFLOC_INDEX("delay_max_sweeps", settings.design.delays.max_sweeps),
      Field{"schemes",
            [](ScenarioConfig& c, const std::string& v) {
              c.schemes = list_value<Scheme>(v, [](const std::string& s) { return parse_scheme(s); });
            },
            [](const ScenarioConfig& c) { return join(c.schemes, [](const Scheme& s) { return s.name(); }); }},
      Field{"snr_list",
            [](ScenarioConfig& c, const std::string& v) { c.snr_list = list_value<double>(v, real_value); },
            [](const ScenarioConfig& c) { return join(c.snr_list, num); }},
      Field{"nt_list",
            [](ScenarioConfig& c, const std::string& v) { c.nt_list = list_value<Index>(v, index_value); },
            [](const ScenarioConfig& c) { return join(c.nt_list, idx); }},
      Field{"m_list",
            [](ScenarioConfig& c, const std::string& v) { c.m_list = list_value<Index>(v, index_value); },
            [](const ScenarioConfig& c) { return join(c.m_list, idx); }},
      Field{"m_snr_list",
            [](ScenarioConfig& c, const std::string& v) { c.m_snr_list = list_value<double>(v, real_value); },
            [](const ScenarioConfig& c) { return join(c.m_snr_list, num); }},
      Field{"m_schemes",
            [](ScenarioConfig& c, const std::string& v) {
              c.m_schemes = list_value<Scheme>(v, [](const std::string& s) { return parse_scheme(s); });
            },
            [](const ScenarioConfig& c) { return join(c.m_schemes, [](const Scheme& s) { return s.name(); }); }},
      Field{"priors",
            [](ScenarioConfig& c, const std::string& v) { c.priors = list_value<double>(v, real_value); },
            [](const ScenarioConfig& c) { return join(c.priors, num); }},
      NFLOC_REAL("focal_d", focal.d),
      NFLOC_REAL("focal_theta", focal.theta),
      NFLOC_REAL("heatmap_x_min", area.x_min),
      NFLOC_REAL("heatmap_x_max", area.x_max),
      NFLOC_REAL("heatmap_y_min", area.y_min),
      NFLOC_REAL("heatmap_y_max", area.y_max),
      NFLOC_REAL("heatmap_resolution", heatmap_resolution),
      NFLOC_REAL("heatmap_snr_db", heatmap_snr_db),
      NFLOC_INDEX("trackmap_trials", trackmap_trials),
  };
  return table;
}

#undef NFLOC_REAL
#undef NFLOC_INDEX

}  // namespace

void ScenarioConfig::validate() const {
  auto fail = [](const std::string& what) { throw ConfigError(Errc::ValidationError, 0, what); };
  try {
    scenario.validate();
  } catch (const Error& e) {
    fail(e.what());
  }
  try {
    settings.grid.validate();
  } catch (const Error& e) {
    fail(std::string("grid: ") + e.what());
  }
  if (settings.trials < 1) fail("trials must be at least 1");
  if (settings.ap_sweeps < 0) fail("ap_sweeps must be non-negative");
  if (settings.joint_iterations < 0) fail("joint_iterations must be non-negative");
  if (settings.design.outer_iters < 1) fail("design_outer_iters must be at least 1");
  if (!(settings.design.tol > 0.0)) fail("design_tol must be positive");
  if (settings.design.phases.max_iters < 0) fail("rcg_max_iters must be non-negative");
  if (!(settings.design.phases.tol > 0.0)) fail("rcg_tol must be positive");
  if (settings.design.delays.max_sweeps < 1) fail("delay_max_sweeps must be at least 1");
  if (schemes.empty()) fail("schemes must not be empty");
  if (m_schemes.empty()) fail("m_schemes must not be empty");
  if (snr_list.empty()) fail("snr_list must not be empty");
  if (m_snr_list.empty()) fail("m_snr_list must not be empty");
  for (const double s : snr_list) {
    if (std::isnan(s)) fail("snr_list entries must be numbers");
  }
  if (nt_list.empty()) fail("nt_list must not be empty");
  for (const Index nt : nt_list) {
    if (nt < 1 || scenario.antennas % (scenario.rf_chains * nt) != 0) {
      fail("nt_list: n must be divisible by n_d * " + std::to_string(nt));
    }
  }
  if (m_list.empty()) fail("m_list must not be empty");
  for (const Index mm : m_list) {
    if (mm < 1) fail("m_list entries must be at least 1");
    if (mm > 1 && !(scenario.bandwidth > 0.0)) fail("m_list entries above 1 require b > 0");
  }
  for (const double p : priors) {
    if (!(p >= 0.0)) fail("priors must be non-negative");
  }
  if (!is_valid(focal)) fail("focal point must have d > 0 and theta in (0, pi)");
  if (!(area.x_max > area.x_min) || !(area.y_max > area.y_min)) fail("heatmap area is empty");
  if (!(heatmap_resolution > 0.0)) fail("heatmap_resolution must be positive");
  if (std::isnan(heatmap_snr_db)) fail("heatmap_snr_db must be a number");
  if (trackmap_trials < 1) fail("trackmap_trials must be at least 1");
}

ScenarioConfig parse_config_text(const std::string& text) {
  ScenarioConfig cfg;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string raw;
  Index line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string body = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError(Errc::ParseError, line, "expected key = value");
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    if (key.empty()) throw ConfigError(Errc::ParseError, line, "missing key");
    const auto& table = fields();
    const auto it = std::find_if(table.begin(), table.end(), [&](const Field& f) { return key == f.key; });
    if (it == table.end()) throw ConfigError(Errc::ParseError, line, "unknown key '" + key + "'");
    if (!seen.insert(key).second) throw ConfigError(Errc::ParseError, line, "duplicate key '" + key + "'");
    if (value.empty()) throw ConfigError(Errc::ParseError, line, "missing value for '" + key + "'");
    try {
      it->set(cfg, value);
    } catch (const Error& e) {
      throw ConfigError(Errc::ParseError, line, key + ": " + e.what());
    }
  }
  cfg.validate();
  return cfg;
}

ScenarioConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot read config '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config_text(text.str());
}

std::string to_config_text(const ScenarioConfig& config) {
  std::string out;
  for (const Field& f : fields()) out += std::string(f.key) + " = " + f.get(config) + "\n";
  return out;
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const Field& f : fields()) keys.emplace_back(f.key);
  return keys;
}

}  // namespace nfloc
