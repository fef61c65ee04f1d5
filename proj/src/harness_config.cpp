#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <fstream>
#include <set>
#include <sstream>

#include "harness_internal.hpp"

namespace metriflow::harness {

namespace detail {

double to_double(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(what + ": expected a number, got '" + text + "'");
  }
}

int to_int(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(text, &used);
    if (used != text.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(what + ": expected an integer, got '" + text + "'");
  }
}

std::uint64_t to_seed(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const auto v = std::stoull(text, &used);
    if (used != text.size() || text.find('-') != std::string::npos) {
      throw std::invalid_argument("bad seed");
    }
    return v;
  } catch (const std::exception&) {
    throw ConfigError(what + ": expected a non-negative integer seed, got '" + text + "'");
  }
}

bool to_bool(const std::string& text, const std::string& what) {
  if (text == "true" || text == "yes" || text == "1" || text == "on") return true;
  if (text == "false" || text == "no" || text == "0" || text == "off") return false;
  throw ConfigError(what + ": expected true/false, got '" + text + "'");
}

std::vector<std::string> split_list(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

std::vector<double> to_doubles(const std::string& text, const std::string& what) {
  std::vector<double> out;
  for (const auto& s : split_list(text)) out.push_back(to_double(s, what));
  return out;
}

std::string get(const std::map<std::string, std::string>& section, const std::string& key,
                const std::string& fallback) {
  auto it = section.find(key);
  return it == section.end() ? fallback : it->second;
}

void apply_integrator_section(const ExperimentConfig& config, integrate::IntegratorConfig& ic) {
  const auto& s = config.integrator;
  for (const auto& [key, value] : s) {
    const std::string what = "[integrator] " + key;
    if (key == "method") {
      try {
        ic.method = integrate::method_from_string(value);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
    } else if (key == "dt") {
      ic.dt = to_double(value, what);
    } else if (key == "t_max") {
      ic.t_max = to_double(value, what);
    } else if (key == "abs_tol") {
      ic.abs_tol = to_double(value, what);
    } else if (key == "rel_tol") {
      ic.rel_tol = to_double(value, what);
    } else if (key == "stride") {
      ic.observer_stride = to_int(value, what);
    } else if (key == "min_dt") {
      ic.min_dt = to_double(value, what);
    }
  }
}

void apply_threshold_section(const ExperimentConfig& config, Thresholds& t) {
  for (const auto& [key, value] : config.thresholds) {
    const std::string what = "[thresholds] " + key;
    if (key == "slack") {
      t.slack = to_double(value, what);
    } else if (key == "increasing") {
      t.increasing = split_list(value);
    } else if (key == "decreasing") {
      t.decreasing = split_list(value);
    } else if (key.rfind("drift.", 0) == 0) {
      t.drift[key.substr(6)] = to_double(value, what);
    } else if (key.rfind("final.", 0) == 0) {
      t.final_max[key.substr(6)] = to_double(value, what);
    }
  }
}

nlohmann::json thresholds_to_json(const Thresholds& t) {
  return {{"drift", t.drift},
          {"final_max", t.final_max},
          {"increasing", t.increasing},
          {"decreasing", t.decreasing},
          {"slack", t.slack}};
}

}  // namespace detail

namespace {

const std::map<std::string, std::set<std::string>>& allowed_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"system", {"preset", "order", "n", "inertia", "c", "k"}},
      {"initial", {"generator", "mean", "cos", "sin", "count", "amplitude", "seed", "values"}},
      {"integrator", {"method", "dt", "t_max", "abs_tol", "rel_tol", "stride", "min_dt"}},
      {"output", {"dir", "basename", "csv", "json", "states", "csv_states"}},
      {"thresholds", {"slack", "increasing", "decreasing"}},
  };
  return keys;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, const std::string& source) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(source + ": " + e.message() + " (line " + std::to_string(e.line()) + ")");
  }

  ExperimentConfig cfg;
  cfg.source = source;
  for (const auto& [section, body] : tree) {
    auto allowed = allowed_keys().find(section);
    if (allowed == allowed_keys().end()) {
      if (body.empty()) {
        throw ConfigError(source + ": key '" + section + "' outside any section");
      }
      throw ConfigError(source + ": unknown section [" + section + "]");
    }
    std::map<std::string, std::string>* target = nullptr;
    if (section == "system") target = &cfg.system;
    if (section == "initial") target = &cfg.initial;
    if (section == "integrator") target = &cfg.integrator;
    if (section == "output") target = &cfg.output;
    if (section == "thresholds") target = &cfg.thresholds;
    for (const auto& [key, value] : body) {
      const bool prefixed = section == "thresholds" &&
                            (key.rfind("drift.", 0) == 0 || key.rfind("final.", 0) == 0);
      if (!prefixed && allowed->second.count(key) == 0) {
        throw ConfigError(source + ": unknown key '" + key + "' in [" + section + "]");
      }
      (*target)[key] = value.get_value<std::string>();
    }
  }
  cfg.preset = detail::get(cfg.system, "preset", "");
  if (cfg.preset.empty()) throw ConfigError(source + ": [system] preset is required");
  if (cfg.initial.count("seed")) cfg.seed = detail::to_seed(cfg.initial.at("seed"), "[initial] seed");
  // Numeric fields are validated when the experiment is built; parse them
  // here too so malformed values fail before any work starts.
  integrate::IntegratorConfig probe;
  detail::apply_integrator_section(cfg, probe);
  Thresholds tprobe;
  detail::apply_threshold_section(cfg, tprobe);
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path.string());
}

}  // namespace metriflow::harness
