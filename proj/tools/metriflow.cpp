// metriflow: run, list and report structure-preserving flow experiments.
//
//   metriflow run <config.ini>... [--t-max T] [--dt DT] [--out DIR] [--seed S] [--threads K]
//   metriflow list
//   metriflow report <trajectory.json>
//
// Exit codes: 0 success, 1 report FAIL, 2 config or preset error, 3 solver failure.

#include <fstream>
#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "metriflow/harness.hpp"

namespace fs = std::filesystem;
namespace h = metriflow::harness;

int main(int argc, char** argv) {
  CLI::App app{"metriflow: Hamiltonian, gradient and metriplectic flow experiments"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run one or more experiment configs");
  std::vector<std::string> configs;
  double t_max = 0.0;
  double dt = 0.0;
  std::string out;
  std::uint64_t seed = 0;
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  bool quiet = false;
  run->add_option("configs", configs, "INI config files")->required();
  auto* t_opt = run->add_option("--t-max", t_max, "override [integrator] t_max");
  auto* dt_opt = run->add_option("--dt", dt, "override [integrator] dt");
  auto* out_opt = run->add_option("--out", out, "output directory (default: METRIFLOW_OUT_DIR or .)");
  auto* seed_opt = run->add_option("--seed", seed, "override [initial] seed");
  run->add_option("--threads", threads, "worker threads for a sweep")->check(CLI::PositiveNumber);
  run->add_flag("-q,--quiet", quiet, "do not print the conservation report");

  auto* list = app.add_subcommand("list", "list presets");

  auto* rep = app.add_subcommand("report", "conservation summary of a trajectory JSON file");
  std::string trajectory;
  rep->add_option("trajectory", trajectory, "JSON written by `metriflow run`")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (*list) {
    std::cout << h::list_presets();
    return 0;
  }

  if (*rep) {
    std::ifstream in(trajectory);
    if (!in) {
      std::cerr << "metriflow: cannot read '" << trajectory << "'\n";
      return 2;
    }
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      std::cerr << "metriflow: " << trajectory << ": " << e.what() << '\n';
      return 2;
    }
    const auto r = h::report(doc);
    if (doc.contains("meta")) {
      const auto& m = doc["meta"];
      std::cout << "preset " << m.value("preset", "?") << ", status " << m.value("status", "?")
                << ", seed " << m.value("seed", 0) << '\n';
    }
    std::cout << h::format_report(r);
    return r.pass ? 0 : 1;
  }

  h::Overrides o;
  if (*t_opt) o.t_max = t_max;
  if (*dt_opt) o.dt = dt;
  if (*out_opt) o.out_dir = out;
  if (*seed_opt) o.seed = seed;

  std::vector<fs::path> paths(configs.begin(), configs.end());
  const auto results = h::run_sweep(paths, o, threads);
  int exit_code = 0;
  for (const auto& r : results) {
    if (r.exit_code != 0) {
      std::cerr << "metriflow: " << r.message << '\n';
    } else {
      std::cout << r.message << '\n';
    }
    if (!r.csv_path.empty()) std::cout << "  csv:  " << r.csv_path.string() << '\n';
    if (!r.json_path.empty()) std::cout << "  json: " << r.json_path.string() << '\n';
    if (!quiet && r.exit_code != 2) std::cout << h::format_report(r.summary);
    exit_code = std::max(exit_code, r.exit_code);
  }
  return exit_code;
}
