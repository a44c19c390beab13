#include "paradox/config.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <utility>

namespace paradox::experiments {

namespace {

constexpr std::array<std::pair<ExperimentKind, std::string_view>, 10> kNames{{
    {ExperimentKind::Coin, "coin"},
    {ExperimentKind::CoinScan, "coin-scan"},
    {ExperimentKind::BalanceSign, "balance-sign"},
    {ExperimentKind::BalanceVar, "balance-var"},
    {ExperimentKind::Star3Right, "star3-right"},
    {ExperimentKind::Star3WrongIndistinct, "star3-wrong-indistinct"},
    {ExperimentKind::Star4WrongDistinct, "star4-wrong-distinct"},
    {ExperimentKind::Table1, "table1"},
    {ExperimentKind::Table2, "table2"},
    {ExperimentKind::DecompositionDemo, "decomposition-demo"},
}};

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::string unquote(std::string s) {
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) {
    return s.substr(1, s.size() - 2);
  }
  return s;
}

std::vector<std::string> split_list(std::string_view text) {
  std::string s = trim(text);
  if (!s.empty() && s.front() == '[') {
    if (s.back() != ']') throw ConfigError("unterminated list: " + s);
    s = s.substr(1, s.size() - 2);
  }
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(unquote(item));
  }
  return out;
}

double to_double(const std::string& key, const std::string& raw) {
  const std::string v = unquote(trim(raw));
  if (v == "inf" || v == "infinity") return kInf;
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': expected a number, got '" + raw + "'");
  }
}

long long to_integer(const std::string& key, const std::string& raw) {
  const std::string v = unquote(trim(raw));
  long long out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    // Accept integral scientific notation such as 2e5.
    const double d = to_double(key, raw);
    if (d != std::floor(d) || std::abs(d) > 9e18) {
      throw ConfigError("key '" + key + "': expected an integer, got '" + raw + "'");
    }
    return static_cast<long long>(d);
  }
  return out;
}

}  // namespace

std::string_view to_string(ExperimentKind kind) {
  for (const auto& [k, name] : kNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

std::optional<ExperimentKind> parse_experiment_kind(std::string_view name) {
  for (const auto& [k, n] : kNames) {
    if (n == name) return k;
  }
  return std::nullopt;
}

ExperimentConfig default_config(ExperimentKind kind) {
  ExperimentConfig c;
  c.experiment = kind;
  switch (kind) {
    case ExperimentKind::Coin:
      c.n = {1000, 10000, 100000, 1000000};
      break;
    case ExperimentKind::CoinScan:
      c.p1 = 0.42;
      for (long long n = 1; n <= 12000; ++n) c.n.push_back(n);
      break;
    case ExperimentKind::BalanceSign:
      c.n = {1000};
      c.reps = 10000;
      break;
    case ExperimentKind::BalanceVar:
      c.n = {100};
      c.reps = 100000;
      c.tau1 = 0.3;
      break;
    case ExperimentKind::Star3Right:
      c.n = {1000};
      c.reps = 1000;
      c.gamma_alpha = kInf;
      break;
    case ExperimentKind::Star3WrongIndistinct:
      c.n = {1000};
      c.reps = 1000;
      c.gamma_alpha = 1.0;
      break;
    case ExperimentKind::Star4WrongDistinct:
      c.n = {1000};
      c.reps = 200;
      break;
    case ExperimentKind::Table1:
      c.n = {1000, 10000};
      c.reps = 200;
      break;
    case ExperimentKind::Table2:
      c.n = {1000};
      c.reps = 200;
      c.internal_length = 0.002;
      break;
    case ExperimentKind::DecompositionDemo:
      c.n = {100, 1000, 10000, 100000};
      c.reps = 1000;
      break;
  }
  return c;
}

std::map<std::string, std::string> parse_key_values(std::string_view text) {
  std::map<std::string, std::string> out;
  std::stringstream ss{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[' && line.back() == ']') continue;  // section headers are ignored
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    }
    std::string key = trim(std::string_view(line).substr(0, eq));
    std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");
    std::replace(key.begin(), key.end(), '-', '_');
    out[key] = value;
  }
  return out;
}

std::vector<long long> parse_n_list(std::string_view text) {
  std::vector<long long> out;
  for (const std::string& item : split_list(text)) {
    if (const auto colon = item.find(':'); colon != std::string::npos) {
      const long long lo = to_integer("n", item.substr(0, colon));
      const long long hi = to_integer("n", item.substr(colon + 1));
      if (hi < lo) throw ConfigError("n: empty range " + item);
      for (long long v = lo; v <= hi; ++v) out.push_back(v);
    } else {
      out.push_back(to_integer("n", item));
    }
  }
  return out;
}

void apply_overrides(ExperimentConfig& c, const std::map<std::string, std::string>& values) {
  for (const auto& [key, raw] : values) {
    const std::string value = unquote(trim(raw));
    auto dbl = [&] { return to_double(key, raw); };
    auto integer = [&] { return to_integer(key, raw); };
    if (key == "experiment") {
      const auto kind = parse_experiment_kind(value);
      if (!kind) throw ConfigError("unknown experiment '" + value + "'");
      c.experiment = *kind;
    } else if (key == "n") {
      c.n = parse_n_list(raw);
    } else if (key == "reps") {
      c.reps = static_cast<int>(integer());
    } else if (key == "seed") {
      c.seed = static_cast<std::uint64_t>(integer());
    } else if (key == "output_dir" || key == "out") {
      c.output_dir = value;
    } else if (key == "workers") {
      c.workers = static_cast<int>(integer());
    } else if (key == "mode") {
      if (value != "exact" && value != "simulate") throw ConfigError("mode must be exact or simulate");
      c.exact = value == "exact";
    } else if (key == "p_true") {
      c.p_true = dbl();
    } else if (key == "p1") {
      c.p1 = dbl();
    } else if (key == "p2") {
      c.p2 = dbl();
    } else if (key == "alpha") {
      c.alpha = dbl();
    } else if (key == "threshold") {
      c.threshold = dbl();
    } else if (key == "tau") {
      c.tau = dbl();
    } else if (key == "xi") {
      c.xi = dbl();
    } else if (key == "tau1") {
      c.tau1 = dbl();
    } else if (key == "tau2") {
      c.tau2 = dbl();
    } else if (key == "branch_length") {
      c.branch_length = dbl();
    } else if (key == "internal_length") {
      c.internal_length = dbl();
    } else if (key == "gamma_alpha") {
      c.gamma_alpha = dbl();
    } else if (key == "prior_mean_t0") {
      c.prior.mean_t0 = dbl();
    } else if (key == "prior_mean_t1") {
      c.prior.mean_t1 = dbl();
    } else if (key == "prior_mean_all") {
      c.prior.mean_all = dbl();
    } else if (key == "quadrature_points") {
      c.quadrature_points = static_cast<int>(integer());
    } else if (key == "mcmc_iterations") {
      c.mcmc.iterations = integer();
    } else if (key == "mcmc_chains") {
      c.mcmc.chains = static_cast<int>(integer());
    } else if (key == "mcmc_burn_in") {
      c.mcmc.burn_in_fraction = dbl();
    } else if (key == "mcmc_topology_move_prob") {
      c.mcmc.topology_move_prob = dbl();
    } else if (key == "mcmc_convergence_threshold") {
      c.mcmc.convergence_threshold = dbl();
    } else if (key == "ternary_bins") {
      c.ternary_bins = static_cast<int>(integer());
    } else if (key == "thresholds") {
      c.thresholds.clear();
      for (const auto& item : split_list(raw)) c.thresholds.push_back(to_double(key, item));
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
}

void validate(const ExperimentConfig& c) {
  auto require = [](bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
  };
  auto open_unit = [](double p) { return p > 0.0 && p < 1.0; };
  require(c.reps >= 1, "reps must be >= 1");
  require(!c.n.empty(), "n must list at least one data size");
  require(std::all_of(c.n.begin(), c.n.end(), [](long long v) { return v >= 1; }), "n values must be >= 1");
  require(c.workers >= 1, "workers must be >= 1");
  require(!c.output_dir.empty(), "output_dir must be set");
  require(!c.thresholds.empty(), "thresholds must be non-empty");
  for (double t : c.thresholds) require(open_unit(t), "thresholds must lie in (0, 1)");

  switch (c.experiment) {
    case ExperimentKind::Coin:
    case ExperimentKind::CoinScan:
      require(open_unit(c.p_true) && open_unit(c.p1) && open_unit(c.p2), "coin probabilities must lie in (0, 1)");
      require(c.p1 != c.p2, "p1 and p2 must differ");
      require(c.alpha > 0.0 && c.alpha < 0.5, "alpha must lie in (0, 1/2)");
      require(c.threshold > 0.5 && c.threshold < 1.0, "threshold must lie in (1/2, 1)");
      if (c.experiment == ExperimentKind::Coin && c.exact) {
        require(*std::max_element(c.n.begin(), c.n.end()) <= 10000000, "exact coin sums need n <= 1e7");
      }
      break;
    case ExperimentKind::BalanceSign:
      require(c.tau > 0.0 && c.xi > 0.0, "tau and xi must be > 0");
      break;
    case ExperimentKind::BalanceVar:
    case ExperimentKind::DecompositionDemo:
      require(c.tau1 > 0.0 && c.tau2 > 0.0 && c.xi > 0.0, "tau1, tau2 and xi must be > 0");
      require(c.tau1 != c.tau2, "tau1 and tau2 must differ");
      require(*std::min_element(c.n.begin(), c.n.end()) >= 2, "variance-pair experiments need n >= 2");
      break;
    case ExperimentKind::Star3Right:
    case ExperimentKind::Star3WrongIndistinct:
      require(c.prior.mean_t0 > 0.0 && c.prior.mean_t1 > 0.0, "prior means must be > 0");
      require(c.quadrature_points >= 2, "quadrature_points must be >= 2");
      require(c.branch_length > 0.0, "branch_length must be > 0");
      require(c.gamma_alpha > 0.0, "gamma_alpha must be > 0");
      require(c.ternary_bins >= 1, "ternary_bins must be >= 1");
      break;
    case ExperimentKind::Star4WrongDistinct:
    case ExperimentKind::Table1:
    case ExperimentKind::Table2:
      require(c.prior.mean_all > 0.0, "prior_mean_all must be > 0");
      require(c.branch_length > 0.0, "branch_length must be > 0");
      require(c.internal_length >= 0.0, "internal_length must be >= 0");
      require(c.gamma_alpha > 0.0, "gamma_alpha must be > 0");
      require(c.mcmc.iterations >= 1, "mcmc_iterations must be >= 1");
      require(c.mcmc.chains >= 1, "mcmc_chains must be >= 1");
      require(c.mcmc.burn_in_fraction >= 0.0 && c.mcmc.burn_in_fraction < 1.0, "mcmc_burn_in must lie in [0, 1)");
      require(c.mcmc.topology_move_prob > 0.0 && c.mcmc.topology_move_prob < 1.0,
              "mcmc_topology_move_prob must lie in (0, 1)");
      require(c.ternary_bins >= 1, "ternary_bins must be >= 1");
      break;
  }
}

ExperimentConfig load_config(const std::filesystem::path& path, std::optional<ExperimentKind> kind) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  auto values = parse_key_values(buffer.str());

  std::optional<ExperimentKind> from_file;
  if (auto it = values.find("experiment"); it != values.end()) {
    from_file = parse_experiment_kind(unquote(it->second));
    if (!from_file) throw ConfigError("unknown experiment '" + it->second + "'");
  }
  if (kind && from_file && *kind != *from_file) {
    throw ConfigError("config file is for experiment '" + std::string(to_string(*from_file)) +
                      "', not '" + std::string(to_string(*kind)) + "'");
  }
  const auto chosen = kind ? kind : from_file;
  if (!chosen) throw ConfigError("no experiment given");
  ExperimentConfig config = default_config(*chosen);
  apply_overrides(config, values);
  return config;
}

}  // namespace paradox::experiments
