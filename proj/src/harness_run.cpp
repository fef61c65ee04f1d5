#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <thread>

#include "harness_internal.hpp"

namespace metriflow::harness {

namespace {

using circle::PeriodicField;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using nlohmann::json;

// ---- state serialization --------------------------------------------------------

json state_json(const PeriodicField& u) {
  json modes = json::array();
  for (int n = -u.order(); n <= u.order(); ++n) {
    const auto c = u.coeff(n);
    modes.push_back({n, c.real(), c.imag()});
  }
  return modes;
}

json state_json(const VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json state_json(const MatrixXd& m) {
  std::vector<double> flat;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) flat.push_back(m(i, j));
  }
  return flat;
}

std::vector<double> state_values(const PeriodicField& u) {
  std::vector<double> out{u.coeff(0).real()};
  for (int n = 1; n <= u.order(); ++n) {
    out.push_back(u.coeff(n).real());
    out.push_back(u.coeff(n).imag());
  }
  return out;
}

std::vector<double> state_values(const VectorXd& v) { return state_json(v).get<std::vector<double>>(); }
std::vector<double> state_values(const MatrixXd& m) { return state_json(m).get<std::vector<double>>(); }

const char* layout(const PeriodicField&) { return "fourier modes [n, re, im], n = -N..N"; }
const char* layout(const VectorXd&) { return "vector"; }
const char* layout(const MatrixXd&) { return "matrix, row-major flattened"; }

std::string format_number(double x) {
  std::ostringstream s;
  s << std::setprecision(17) << x;
  return s.str();
}

// ---- output locations -----------------------------------------------------------

std::filesystem::path output_dir(const ExperimentConfig& cfg, const Overrides& o) {
  if (o.out_dir) return *o.out_dir;
  if (cfg.output.count("dir")) return cfg.output.at("dir");
  if (const char* env = std::getenv("METRIFLOW_OUT_DIR"); env != nullptr && *env != '\0') return env;
  return ".";
}

std::string basename(const ExperimentConfig& cfg) {
  if (cfg.output.count("basename")) return cfg.output.at("basename");
  if (cfg.source != "<memory>") return std::filesystem::path(cfg.source).stem().string();
  return cfg.preset;
}

template <class State, class Exp>
RunResult execute(const ExperimentConfig& cfg, const Overrides& o, Exp& ex, std::uint64_t seed,
                  const std::function<integrate::Trajectory<State>(const Exp&)>& solve) {
  RunResult result;
  if (o.t_max) ex.integrator.t_max = *o.t_max;
  if (o.dt) ex.integrator.dt = *o.dt;
  try {
    integrate::validate(ex.integrator);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const bool want_csv = detail::to_bool(detail::get(cfg.output, "csv", "true"), "[output] csv");
  const bool want_json = detail::to_bool(detail::get(cfg.output, "json", "true"), "[output] json");
  const bool keep_states =
      detail::to_bool(detail::get(cfg.output, "states", "true"), "[output] states");
  const bool csv_states = detail::to_bool(
      detail::get(cfg.output, "csv_states", ex.states_in_csv ? "true" : "false"),
      "[output] csv_states");
  ex.integrator.keep_states = keep_states || csv_states;

  integrate::Trajectory<State> traj;
  try {
    traj = solve(ex);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    traj.status = integrate::Status::nan_detected;
    traj.message = std::string("solver error: ") + e.what();
  }

  json doc;
  json meta = {{"preset", cfg.preset},
               {"source", cfg.source},
               {"seed", seed},
               {"method", integrate::to_string(ex.integrator.method)},
               {"dt", ex.integrator.dt},
               {"t_max", ex.integrator.t_max},
               {"observer_stride", ex.integrator.observer_stride},
               {"status", integrate::to_string(traj.status)},
               {"message", traj.message},
               {"accepted_steps", traj.accepted_steps},
               {"rejected_steps", traj.rejected_steps},
               {"state_layout", layout(ex.initial)},
               {"parameters", ex.parameters},
               {"thresholds", detail::thresholds_to_json(ex.thresholds)}};
  if (ex.integrator.method == integrate::Method::rk45_adaptive) {
    meta["abs_tol"] = ex.integrator.abs_tol;
    meta["rel_tol"] = ex.integrator.rel_tol;
  }
  doc["meta"] = meta;
  doc["times"] = traj.times;
  json states = json::array();
  if (keep_states) {
    for (const auto& s : traj.states) states.push_back(state_json(s));
  }
  doc["states"] = states;
  json diags = json::object();
  for (std::size_t i = 0; i < traj.diagnostic_names.size(); ++i) {
    diags[traj.diagnostic_names[i]] = traj.diagnostics[i];
  }
  doc["diagnostics"] = diags;

  const auto dir = output_dir(cfg, o);
  const auto base = basename(cfg);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + dir.string() + "': " + ec.message());

  if (want_csv) {
    result.csv_path = dir / (base + ".csv");
    std::ofstream out(result.csv_path);
    if (!out) throw ConfigError("cannot write '" + result.csv_path.string() + "'");
    out << "t";
    if (csv_states) {
      for (const auto& c : ex.state_columns) out << ',' << c;
    }
    for (const auto& n : traj.diagnostic_names) out << ',' << n;
    out << '\n';
    for (std::size_t r = 0; r < traj.times.size(); ++r) {
      out << format_number(traj.times[r]);
      if (csv_states) {
        for (double v : state_values(traj.states[r])) out << ',' << format_number(v);
      }
      for (const auto& series : traj.diagnostics) out << ',' << format_number(series[r]);
      out << '\n';
    }
  }
  if (want_json) {
    result.json_path = dir / (base + ".json");
    std::ofstream out(result.json_path);
    if (!out) throw ConfigError("cannot write '" + result.json_path.string() + "'");
    out << doc.dump(1) << '\n';
  }

  result.summary = report(doc);
  result.trajectory = std::move(doc);
  if (traj.status != integrate::Status::ok) {
    result.exit_code = 3;
    result.message = cfg.source + ": solver failure (" + integrate::to_string(traj.status) +
                     "): " + traj.message + "; last good state at t = " +
                     std::to_string(traj.last_good_time);
  } else {
    result.message = cfg.source + ": " + cfg.preset + " finished, " +
                     std::to_string(traj.accepted_steps) + " steps";
  }
  return result;
}

}  // namespace

RunResult run(const ExperimentConfig& cfg, const Overrides& o) {
  try {
    const auto& info = find_preset(cfg.preset);
    const std::uint64_t seed = o.seed ? *o.seed : cfg.seed.value_or(1);
    switch (info.kind) {
      case StateKind::field: {
        auto ex = detail::build_field_experiment(cfg, seed);
        return execute<PeriodicField, detail::FieldExperiment>(
            cfg, o, ex, seed, [](const detail::FieldExperiment& e) {
              return integrate::integrate(e.split, e.initial, e.integrator, e.diagnostics);
            });
      }
      case StateKind::vector: {
        auto ex = detail::build_vector_experiment(cfg, seed);
        return execute<VectorXd, detail::Experiment<VectorXd>>(
            cfg, o, ex, seed, [](const detail::Experiment<VectorXd>& e) {
              return integrate::integrate<VectorXd>(e.field, e.initial, e.integrator, e.diagnostics);
            });
      }
      case StateKind::matrix: {
        auto ex = detail::build_matrix_experiment(cfg, seed);
        return execute<MatrixXd, detail::Experiment<MatrixXd>>(
            cfg, o, ex, seed, [](const detail::Experiment<MatrixXd>& e) {
              return integrate::integrate<MatrixXd>(e.field, e.initial, e.integrator, e.diagnostics);
            });
      }
    }
  } catch (const ConfigError& e) {
    RunResult r;
    r.exit_code = 2;
    r.message = cfg.source + ": " + e.what();
    return r;
  }
  RunResult r;
  r.exit_code = 2;
  r.message = cfg.source + ": unhandled preset kind";
  return r;
}

RunResult run_file(const std::filesystem::path& path, const Overrides& o) {
  ExperimentConfig cfg;
  try {
    cfg = load_config(path);
  } catch (const ConfigError& e) {
    RunResult r;
    r.exit_code = 2;
    r.message = e.what();
    return r;
  }
  return run(cfg, o);
}

std::vector<RunResult> run_sweep(const std::vector<std::filesystem::path>& paths,
                                 const Overrides& o, unsigned threads) {
  std::vector<RunResult> results(paths.size());
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(paths.size())));
  std::mutex mutex;
  std::size_t next = 0;
  auto worker = [&] {
    for (;;) {
      std::size_t i;
      {
        std::lock_guard<std::mutex> lock(mutex);
        if (next >= paths.size()) return;
        i = next++;
      }
      results[i] = run_file(paths[i], o);
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return results;
}

}  // namespace metriflow::harness
