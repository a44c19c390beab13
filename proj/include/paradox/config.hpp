#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "paradox/phylo.hpp"

namespace paradox::experiments {

enum class ExperimentKind {
  Coin,
  CoinScan,
  BalanceSign,
  BalanceVar,
  Star3Right,
  Star3WrongIndistinct,
  Star4WrongDistinct,
  Table1,
  Table2,
  DecompositionDemo,
};

std::string_view to_string(ExperimentKind kind);
std::optional<ExperimentKind> parse_experiment_kind(std::string_view name);

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::Coin;
  std::vector<long long> n;
  int reps = 1000;
  std::uint64_t seed = 1;
  std::filesystem::path output_dir = "paradox-out";
  int workers = 1;
  bool exact = true;  // coin: exact binomial sums instead of simulation

  // coin, coin-scan
  double p_true = 0.5;
  double p1 = 0.4;
  double p2 = 0.6;
  double alpha = 0.01;
  double threshold = 0.99;

  // balance-sign, balance-var, decomposition-demo
  double tau = 1.0;
  double xi = 1.0;
  double tau1 = 0.25;
  double tau2 = 2.58666;

  // star experiments
  double branch_length = 0.2;     // pendant (or clock depth) of the generating tree
  double internal_length = 0.0;   // generating internal branch (table2: 0.002)
  double gamma_alpha = 1.0;       // generating rate heterogeneity; inf = JC
  phylo::PhyloPrior prior;
  int quadrature_points = 128;
  phylo::McmcConfig mcmc;
  int ternary_bins = 10;

  std::vector<double> thresholds{0.01, 0.05, 0.95, 0.99};
};

/// Defaults for one experiment (n grid, reps, model settings).
ExperimentConfig default_config(ExperimentKind kind);

/// Raw `key = value` pairs of a TOML-style file: one pair per line, `#`
/// comments, optional quotes around strings, `[a, b, ...]` lists.
std::map<std::string, std::string> parse_key_values(std::string_view text);

/// Applies key-value overrides on top of `base`. Unknown keys are errors.
void apply_overrides(ExperimentConfig& config, const std::map<std::string, std::string>& values);

/// Parses "1000", "[1000, 10000]" or a range "1:12000".
std::vector<long long> parse_n_list(std::string_view text);

/// Throws ConfigError when a field is missing or out of range for the experiment.
void validate(const ExperimentConfig& config);

/// Loads a config file. The experiment key selects the defaults the rest of
/// the file overrides; `kind` supplies it when the file omits it.
ExperimentConfig load_config(const std::filesystem::path& path,
                             std::optional<ExperimentKind> kind = std::nullopt);

}  // namespace paradox::experiments
