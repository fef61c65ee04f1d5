#pragma once

// Experiment harness: INI configuration, preset registry, runs with CSV/JSON
// output and conservation reports. See README.md for the config grammar.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "metriflow/integrators.hpp"

namespace metriflow::harness {

/// Bad config, unknown preset or unusable parameter; exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class StateKind { field, vector, matrix };

struct PresetInfo {
  std::string name;
  StateKind kind;
  std::string description;
  std::string anchor;
};

const std::vector<PresetInfo>& preset_catalog();
const PresetInfo& find_preset(const std::string& name);  // throws ConfigError
std::string list_presets();

/// Linear/remainder split used by the integrating-factor method for a field
/// preset at the given truncation order.
integrate::StiffSplit field_preset_split(const std::string& name);

struct Thresholds {
  std::map<std::string, double> drift;      // max |x(t) - x(0)|
  std::map<std::string, double> final_max;  // |x(t_end)| bound
  std::vector<std::string> increasing;
  std::vector<std::string> decreasing;
  double slack = 1e-10;  // per-sample tolerance for monotonicity
};

struct ExperimentConfig {
  std::string source = "<memory>";
  std::string preset;
  std::map<std::string, std::string> system;
  std::map<std::string, std::string> initial;
  std::map<std::string, std::string> integrator;
  std::map<std::string, std::string> output;
  std::map<std::string, std::string> thresholds;
  std::optional<std::uint64_t> seed;
};

/// Parses INI text. Throws ConfigError on syntax errors, unknown sections or keys,
/// or a missing [system] preset.
ExperimentConfig parse_config(const std::string& text, const std::string& source = "<memory>");
ExperimentConfig load_config(const std::filesystem::path& path);

struct Overrides {
  std::optional<double> t_max;
  std::optional<double> dt;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
};

struct ObservableReport {
  std::string name;
  double initial = 0.0;
  double final = 0.0;
  double max_drift = 0.0;
  std::string monotone;  // "increasing", "decreasing", "constant" or "none"
  std::string verdict;   // "PASS", "FAIL" or "SKIP"
  std::string detail;
};

struct Report {
  std::vector<ObservableReport> observables;
  bool pass = true;
};

/// Summary of a trajectory document {meta, times, states, diagnostics} against
/// the thresholds stored in meta.thresholds. Observables named in the
/// thresholds but absent from the diagnostics are reported as SKIP.
Report report(const nlohmann::json& trajectory);
std::string format_report(const Report& r);

struct RunResult {
  int exit_code = 0;  // 0 ok, 2 config error, 3 solver failure
  std::string message;
  std::filesystem::path csv_path;
  std::filesystem::path json_path;
  nlohmann::json trajectory;  // the emitted JSON document
  Report summary;
};

/// Runs one experiment. Never throws; errors are mapped to exit codes.
RunResult run(const ExperimentConfig& config, const Overrides& overrides = {});
RunResult run_file(const std::filesystem::path& path, const Overrides& overrides = {});

/// Runs the configs on up to `threads` workers; results are in input order.
std::vector<RunResult> run_sweep(const std::vector<std::filesystem::path>& paths,
                                 const Overrides& overrides, unsigned threads);

}  // namespace metriflow::harness
