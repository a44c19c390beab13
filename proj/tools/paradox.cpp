#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "paradox/config.hpp"
#include "paradox/experiments.hpp"

namespace px = paradox::experiments;

int main(int argc, char** argv) {
  CLI::App app{"Bayesian model selection under misspecification: desk-scale experiments"};
  app.set_version_flag("--version", std::string(PARADOX_VERSION));

  std::string experiment;
  std::string config_path;
  std::vector<std::string> n_values;
  std::optional<int> reps;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<int> workers;
  bool exact = false;
  bool simulate = false;

  app.add_option("experiment", experiment,
                 "coin, coin-scan, balance-sign, balance-var, star3-right, star3-wrong-indistinct, "
                 "star4-wrong-distinct, table1, table2, decomposition-demo")
      ->required();
  app.add_option("--config", config_path, "key = value config file")->check(CLI::ExistingFile);
  app.add_option("--n", n_values, "data sizes; a value may be a range lo:hi");
  app.add_option("--reps", reps, "replicates per data size");
  app.add_option("--seed", seed, "master seed");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--workers", workers, "worker threads (overrides PARADOX_WORKERS)");
  auto* exact_flag = app.add_flag("--exact", exact, "coin: exact binomial sums");
  auto* simulate_flag = app.add_flag("--simulate", simulate, "coin: simulated replicates");
  exact_flag->excludes(simulate_flag);

  CLI11_PARSE(app, argc, argv);

  try {
    const auto kind = px::parse_experiment_kind(experiment);
    if (!kind) throw px::ConfigError("unknown experiment '" + experiment + "'");
    px::ExperimentConfig config =
        config_path.empty() ? px::default_config(*kind) : px::load_config(config_path, kind);

    if (!n_values.empty()) {
      config.n.clear();
      for (const auto& v : n_values) {
        const auto parsed = px::parse_n_list(v);
        config.n.insert(config.n.end(), parsed.begin(), parsed.end());
      }
    }
    if (reps) config.reps = *reps;
    if (seed) config.seed = *seed;
    if (out_dir) config.output_dir = *out_dir;
    if (workers) {
      config.workers = *workers;
    } else if (const char* env = std::getenv("PARADOX_WORKERS"); env && *env) {
      std::map<std::string, std::string> kv{{"workers", env}};
      px::apply_overrides(config, kv);
    }
    if (exact) config.exact = true;
    if (simulate) config.exact = false;

    const auto report = px::run_experiment(config);
    std::cout << px::to_string(config.experiment) << ": " << report.replicates << " replicates, "
              << report.wall_seconds << " s, output in " << report.output_dir.string() << '\n';
    return 0;
  } catch (const px::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
