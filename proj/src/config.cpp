#include "mixtopo/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <sstream>

#include "mixtopo/serialize.hpp"

namespace mixtopo {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  if (out.empty()) throw ConfigError("empty list");
  return out;
}

double positive(double v) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError("must be positive and finite");
  return v;
}

double finite(double v) {
  if (!std::isfinite(v)) throw ConfigError("must be finite");
  return v;
}

int integer(const std::string& s, int min_value) {
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(s, &used);
  } catch (const std::exception&) {
    throw ConfigError("not an integer: '" + s + "'");
  }
  if (used != s.size()) throw ConfigError("not an integer: '" + s + "'");
  if (v < min_value) throw ConfigError("must be at least " + std::to_string(min_value));
  return v;
}

using Setter = std::function<void(RunConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"model",
       [](RunConfig& c, const std::string& v) {
         if (v != "qwz" && v != "atomic" && v != "tabulated") {
           throw ConfigError("expected qwz, atomic or tabulated");
         }
         c.model = v;
       }},
      {"alpha", [](RunConfig& c, const std::string& v) { c.qwz.alpha = finite(parse_double(v)); }},
      {"gamma", [](RunConfig& c, const std::string& v) { c.qwz.gamma = finite(parse_double(v)); }},
      {"mass", [](RunConfig& c, const std::string& v) { c.qwz.mass = finite(parse_double(v)); }},
      {"atomic_dz", [](RunConfig& c, const std::string& v) { c.atomic_dz = finite(parse_double(v)); }},
      {"hfict_file", [](RunConfig& c, const std::string& v) { c.hfict_file = v; }},
      {"hfict_margin",
       [](RunConfig& c, const std::string& v) {
         const double m = parse_double(v);
         if (!(m >= 0.0 && m < 0.5)) throw ConfigError("must lie in [0, 0.5)");
         c.hfict_margin = m;
       }},
      {"mu", [](RunConfig& c, const std::string& v) { c.mu = finite(parse_double(v)); }},
      {"nx", [](RunConfig& c, const std::string& v) { c.nx = integer(v, 2); }},
      {"ny", [](RunConfig& c, const std::string& v) { c.ny = integer(v, 2); }},
      {"temperatures",
       [](RunConfig& c, const std::string& v) {
         c.temperatures.clear();
         for (const auto& item : split_list(v)) {
           const double t = parse_double(item);
           if (!(t >= 0.0) || !std::isfinite(t)) throw ConfigError("temperatures must be >= 0 and finite");
           c.temperatures.push_back(t);
         }
       }},
      {"temperature_unit",
       [](RunConfig& c, const std::string& v) {
         if (v == "gap") c.temperature_unit = TemperatureUnit::gap;
         else if (v == "energy") c.temperature_unit = TemperatureUnit::energy;
         else throw ConfigError("expected gap or energy");
       }},
      {"chain_length", [](RunConfig& c, const std::string& v) { c.chain_length = integer(v, 2); }},
      {"chain_lengths",
       [](RunConfig& c, const std::string& v) {
         c.chain_lengths.clear();
         for (const auto& item : split_list(v)) c.chain_lengths.push_back(integer(item, 2));
         for (std::size_t i = 1; i < c.chain_lengths.size(); ++i) {
           if (c.chain_lengths[i] <= c.chain_lengths[i - 1]) throw ConfigError("must be strictly ascending");
         }
       }},
      {"transverse_points", [](RunConfig& c, const std::string& v) { c.transverse_points = integer(v, 2); }},
      {"transverse_k", [](RunConfig& c, const std::string& v) { c.transverse_k = parse_angle(v); }},
      {"directions",
       [](RunConfig& c, const std::string& v) {
         c.directions.clear();
         for (const auto& item : split_list(v)) c.directions.push_back(direction_from_string(item));
       }},
      {"scan_t_min", [](RunConfig& c, const std::string& v) { c.scan_t_min = positive(parse_double(v)); }},
      {"scan_t_max", [](RunConfig& c, const std::string& v) { c.scan_t_max = positive(parse_double(v)); }},
      {"scan_points", [](RunConfig& c, const std::string& v) { c.scan_points = integer(v, 2); }},
      {"path_samples", [](RunConfig& c, const std::string& v) { c.path.initial_samples = integer(v, 2); }},
      {"path_samples_max", [](RunConfig& c, const std::string& v) { c.path.max_samples = integer(v, 2); }},
      {"path_tolerance", [](RunConfig& c, const std::string& v) { c.path.tolerance = positive(parse_double(v)); }},
      {"output_dir", [](RunConfig& c, const std::string& v) { c.output_dir = v; }},
      {"format",
       [](RunConfig& c, const std::string& v) {
         if (v == "csv") c.format = OutputFormat::csv;
         else if (v == "json") c.format = OutputFormat::json;
         else throw ConfigError("expected csv or json");
       }},
      {"jobs", [](RunConfig& c, const std::string& v) { c.jobs = integer(v, 1); }},
  };
  return table;
}

template <class T, class F>
std::string join(const std::vector<T>& items, F&& fmt) {
  std::string out;
  for (const auto& item : items) out += (out.empty() ? "" : ", ") + fmt(item);
  return out;
}

}  // namespace

double parse_angle(const std::string& text) {
  const std::string s = trim(text);
  const auto pos = s.find("pi");
  if (pos == std::string::npos) return finite(parse_double(s));
  std::string factor = trim(s.substr(0, pos));
  std::string rest = trim(s.substr(pos + 2));
  double value = kPi;
  if (!factor.empty()) {
    if (factor == "-") value = -kPi;
    else if (factor == "+") value = kPi;
    else {
      if (factor.back() == '*') factor = trim(factor.substr(0, factor.size() - 1));
      value = parse_double(factor) * kPi;
    }
  }
  if (!rest.empty()) {
    if (rest.front() != '/') throw ConfigError("malformed angle '" + s + "'");
    const double d = parse_double(trim(rest.substr(1)));
    if (d == 0.0) throw ConfigError("division by zero in angle '" + s + "'");
    value /= d;
  }
  return value;
}

RunConfig parse_config(std::istream& is) {
  RunConfig config;
  std::string line;
  int number = 0;
  while (std::getline(is, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(number) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) {
      throw ConfigError("line " + std::to_string(number) + ": unknown key '" + key + "'");
    }
    try {
      it->second(config, value);
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(number) + ": key '" + key + "': " + e.what());
    }
  }
  if (config.scan_t_max <= config.scan_t_min) throw ConfigError("scan_t_max must exceed scan_t_min");
  if (config.path.max_samples < config.path.initial_samples) {
    throw ConfigError("path_samples_max must be at least path_samples");
  }
  if (config.model == "tabulated" && config.hfict_file.empty()) {
    throw ConfigError("model = tabulated needs hfict_file");
  }
  return config;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in);
}

std::map<std::string, std::string> RunConfig::echo() const {
  std::map<std::string, std::string> m;
  m["model"] = model;
  m["alpha"] = format_double(qwz.alpha);
  m["gamma"] = format_double(qwz.gamma);
  m["mass"] = format_double(qwz.mass);
  m["atomic_dz"] = format_double(atomic_dz);
  m["hfict_file"] = hfict_file;
  m["hfict_margin"] = format_double(hfict_margin);
  m["mu"] = format_double(mu);
  m["nx"] = std::to_string(nx);
  m["ny"] = std::to_string(ny);
  m["temperatures"] = join(temperatures, format_double);
  m["temperature_unit"] = temperature_unit == TemperatureUnit::gap ? "gap" : "energy";
  m["chain_length"] = std::to_string(chain_length);
  m["chain_lengths"] = join(chain_lengths, [](int n) { return std::to_string(n); });
  m["transverse_points"] = std::to_string(transverse_points);
  m["transverse_k"] = format_double(transverse_k);
  m["directions"] = join(directions, [](Direction d) { return std::string(to_string(d)); });
  m["scan_t_min"] = format_double(scan_t_min);
  m["scan_t_max"] = format_double(scan_t_max);
  m["scan_points"] = std::to_string(scan_points);
  m["path_samples"] = std::to_string(path.initial_samples);
  m["path_samples_max"] = std::to_string(path.max_samples);
  m["path_tolerance"] = format_double(path.tolerance);
  m["output_dir"] = output_dir;
  m["format"] = format == OutputFormat::csv ? "csv" : "json";
  m["jobs"] = std::to_string(jobs);
  return m;
}

bool has_bloch_model(const RunConfig& config) { return config.model != "tabulated"; }

BlochModel build_model(const RunConfig& config) {
  if (config.model == "qwz") return BlochModel::qwz(config.qwz);
  if (config.model == "atomic") {
    const double dz = config.atomic_dz;
    return BlochModel::from_d_vector([dz](const MomentumPoint&) { return DVector{0.0, 0.0, dz}; },
                                     "atomic");
  }
  throw ConfigError("model '" + config.model + "' has no Bloch Hamiltonian (tabulated covariance only)");
}

double config_gap(const RunConfig& config) {
  return band_gap(build_model(config), MomentumGrid(config.nx, config.ny), config.mu);
}

double temperature_energy(const RunConfig& config, double t, double gap) {
  return config.temperature_unit == TemperatureUnit::gap ? t * gap : t;
}

GaussianStateSpec build_state(const RunConfig& config, double temperature) {
  if (!has_bloch_model(config)) {
    std::ifstream in(config.hfict_file);
    if (!in) throw ConfigError("cannot open hfict_file '" + config.hfict_file + "'");
    return GaussianStateSpec::tabulated(read_matrix_grid(in), config.hfict_margin);
  }
  if (temperature == 0.0) return GaussianStateSpec::ground_state(build_model(config), config.mu);
  return GaussianStateSpec::thermal(build_model(config), 1.0 / temperature, config.mu);
}

}  // namespace mixtopo
