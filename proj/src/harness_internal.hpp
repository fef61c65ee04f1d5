#pragma once

// Shared pieces of the harness implementation.

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "metriflow/harness.hpp"
#include "metriflow/integrators.hpp"

namespace metriflow::harness::detail {

double to_double(const std::string& text, const std::string& what);
int to_int(const std::string& text, const std::string& what);
std::uint64_t to_seed(const std::string& text, const std::string& what);
bool to_bool(const std::string& text, const std::string& what);
std::vector<std::string> split_list(const std::string& text, char sep = ',');
std::vector<double> to_doubles(const std::string& text, const std::string& what);

/// Lookup with default in a config section.
std::string get(const std::map<std::string, std::string>& section, const std::string& key,
                const std::string& fallback);

template <class State>
struct Experiment {
  integrate::Field<State> field;
  State initial{};
  std::vector<integrate::Diagnostic<State>> diagnostics;
  integrate::IntegratorConfig integrator;
  Thresholds thresholds;
  bool states_in_csv = true;
  std::vector<std::string> state_columns;
  std::map<std::string, std::string> parameters;  // echoed into meta
};

struct FieldExperiment : Experiment<circle::PeriodicField> {
  integrate::StiffSplit split;
};

FieldExperiment build_field_experiment(const ExperimentConfig& config, std::uint64_t seed);
Experiment<Eigen::VectorXd> build_vector_experiment(const ExperimentConfig& config,
                                                    std::uint64_t seed);
Experiment<Eigen::MatrixXd> build_matrix_experiment(const ExperimentConfig& config,
                                                    std::uint64_t seed);

/// Preset defaults overlaid with the [integrator] and [thresholds] sections.
void apply_integrator_section(const ExperimentConfig& config, integrate::IntegratorConfig& ic);
void apply_threshold_section(const ExperimentConfig& config, Thresholds& t);

nlohmann::json thresholds_to_json(const Thresholds& t);

}  // namespace metriflow::harness::detail
