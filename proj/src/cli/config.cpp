#include "cdiwm/cli/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include "cdiwm/cli/output_table.hpp"
#include "cdiwm/units.hpp"

namespace cdiwm::cli {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  double out{};
  const char* first = value.data();
  const char* last = value.data() + value.size();
  const auto result = std::from_chars(first, last, out);
  if (result.ec != std::errc{} || result.ptr != last)
    throw ConfigError("config: key '" + key + "' expects a number, got '" + value + "'");
  return out;
}

template <typename Int>
Int parse_int(const std::string& key, const std::string& value) {
  Int out{};
  const char* first = value.data();
  const char* last = value.data() + value.size();
  const auto result = std::from_chars(first, last, out);
  if (result.ec != std::errc{} || result.ptr != last)
    throw ConfigError("config: key '" + key + "' expects an integer, got '" + value + "'");
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError("config: key '" + key + "' expects true/false, got '" + value + "'");
}

struct KeyEntry {
  std::string key;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

const std::vector<KeyEntry>& registry() {
  static const std::vector<KeyEntry> entries = [] {
    std::vector<KeyEntry> r;
    const auto dbl = [&r](const std::string& key, double RunConfig::* member) {
      r.push_back({key,
                   [key, member](RunConfig& c, const std::string& v) {
                     c.*member = parse_double(key, v);
                   },
                   [member](const RunConfig& c) { return format_number(c.*member); }});
    };
    const auto intk = [&r](const std::string& key, int RunConfig::* member) {
      r.push_back({key,
                   [key, member](RunConfig& c, const std::string& v) {
                     c.*member = parse_int<int>(key, v);
                   },
                   [member](const RunConfig& c) {
                     return format_number(static_cast<long long>(c.*member));
                   }});
    };
    const auto boolean = [&r](const std::string& key, bool RunConfig::* member) {
      r.push_back({key,
                   [key, member](RunConfig& c, const std::string& v) {
                     c.*member = parse_bool(key, v);
                   },
                   [member](const RunConfig& c) {
                     return std::string(c.*member ? "true" : "false");
                   }});
    };

    dbl("omega0_thz", &RunConfig::omega0_thz);
    dbl("delta_thz", &RunConfig::delta_thz);
    dbl("epsilon_rad", &RunConfig::epsilon_rad);
    dbl("tau_as", &RunConfig::tau_as);
    dbl("grid.omega_span_sigmas", &RunConfig::grid_omega_span_sigmas);
    intk("grid.n_points", &RunConfig::grid_n_points);
    dbl("time.window_factor", &RunConfig::time_window_factor);
    intk("time.n_points", &RunConfig::time_n_points);
    dbl("osa.center_nm", &RunConfig::osa_center_nm);
    dbl("osa.resolution_nm", &RunConfig::osa_resolution_nm);
    dbl("osa.span_nm", &RunConfig::osa_span_nm);
    intk("osa.n_bins", &RunConfig::osa_n_bins);
    r.push_back({"photons",
                 [](RunConfig& c, const std::string& v) {
                   c.photons = parse_int<long long>("photons", v);
                 },
                 [](const RunConfig& c) { return format_number(c.photons); }});
    intk("trials", &RunConfig::trials);
    r.push_back({"seed",
                 [](RunConfig& c, const std::string& v) {
                   c.seed = parse_int<std::uint64_t>("seed", v);
                 },
                 [](const RunConfig& c) {
                   return std::to_string(c.seed);
                 }});
    r.push_back({"sweep.variable",
                 [](RunConfig& c, const std::string& v) {
                   if (v != "tau" && v != "epsilon")
                     throw ConfigError("config: sweep.variable must be tau or epsilon");
                   c.sweep_variable = v;
                 },
                 [](const RunConfig& c) { return c.sweep_variable; }});
    dbl("sweep.min", &RunConfig::sweep_min);
    dbl("sweep.max", &RunConfig::sweep_max);
    intk("sweep.n", &RunConfig::sweep_n);
    boolean("sweep.at_working_point", &RunConfig::sweep_at_working_point);
    r.push_back({"resolve.mode",
                 [](RunConfig& c, const std::string& v) {
                   if (v != "deterministic" && v != "montecarlo" && v != "both")
                     throw ConfigError(
                         "config: resolve.mode must be deterministic, montecarlo or both");
                   c.resolve_mode = v;
                 },
                 [](const RunConfig& c) { return c.resolve_mode; }});
    dbl("resolve.dtau_min_as", &RunConfig::resolve_dtau_min_as);
    dbl("resolve.dtau_max_as", &RunConfig::resolve_dtau_max_as);
    intk("resolve.n_ladder", &RunConfig::resolve_n_ladder);
    intk("resolve.null_trials", &RunConfig::resolve_null_trials);
    boolean("resolve.source_referenced", &RunConfig::resolve_source_referenced);
    return r;
  }();
  return entries;
}

}  // namespace

void RunConfig::set(const std::string& key, const std::string& value) {
  for (const auto& entry : registry()) {
    if (entry.key == key) {
      entry.set(*this, trim(value));
      return;
    }
  }
  throw ConfigError("config: unknown key '" + key + "'");
}

void RunConfig::apply_text(const std::string& text) {
  std::istringstream stream(text);
  std::string line;
  int line_no = 0;
  while (std::getline(stream, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped.front() == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: line " + std::to_string(line_no) +
                        " is not of the form 'key = value'");
    set(trim(stripped.substr(0, eq)), trim(stripped.substr(eq + 1)));
  }
}

void RunConfig::apply_file(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw ConfigError("config: cannot open '" + path + "'");
  std::ostringstream content;
  content << file.rdbuf();
  apply_text(content.str());
}

std::string RunConfig::canonical_text() const {
  std::string out;
  for (const auto& entry : registry()) {
    out += entry.key;
    out += " = ";
    out += entry.get(*this);
    out += '\n';
  }
  return out;
}

const std::vector<std::string>& RunConfig::known_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& entry : registry()) k.push_back(entry.key);
    return k;
  }();
  return keys;
}

void RunConfig::validate() const {
  experiment().validate();
  osa().validate(experiment().meter);
  if (photons < 0) throw ConfigError("config: photons must be nonnegative");
  if (trials < 1) throw ConfigError("config: trials must be at least 1");
  if (sweep_n < 2) throw ConfigError("config: sweep.n must be at least 2");
  if (!(sweep_max > sweep_min)) throw ConfigError("config: sweep.max must exceed sweep.min");
  if (resolve_n_ladder < 1) throw ConfigError("config: resolve.n_ladder must be at least 1");
  if (resolve_null_trials < 1)
    throw ConfigError("config: resolve.null_trials must be at least 1");
  if (!(resolve_dtau_max_as > resolve_dtau_min_as) || !(resolve_dtau_min_as > 0.0))
    throw ConfigError("config: resolve ladder bounds must satisfy 0 < min < max");
}

numerics::ExperimentConfig RunConfig::experiment() const {
  numerics::ExperimentConfig config;
  config.meter = {omega0_thz, delta_thz};
  config.selection = {epsilon_rad};
  config.tau = units::as_to_ps(tau_as);
  config.omega_span_sigmas = grid_omega_span_sigmas;
  config.n_omega = grid_n_points;
  config.time_window_factor = time_window_factor;
  config.n_time = time_n_points;
  return config;
}

instrument::OsaSpec RunConfig::osa() const {
  return {osa_center_nm, osa_resolution_nm, osa_span_nm, osa_n_bins};
}

}  // namespace cdiwm::cli
