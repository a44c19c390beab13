#include "paradox/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <numeric>
#include <optional>
#include <sstream>

#include "paradox/balance.hpp"
#include "paradox/coin.hpp"
#include "paradox/phylo.hpp"
#include "paradox/selection.hpp"

#ifndef PARADOX_VERSION
#define PARADOX_VERSION "0.0.0"
#endif

namespace paradox::experiments {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string num(double v) {
  std::ostringstream out;
  out << std::setprecision(17) << v;
  return out.str();
}

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  void add(std::vector<std::string> row) {
    if (row.size() != header_.size()) throw std::logic_error("CsvTable: row width mismatch");
    rows_.push_back(std::move(row));
  }

  void write(const fs::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    auto line = [&](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
      out << '\n';
    };
    line(header_);
    for (const auto& r : rows_) line(r);
    if (!out) throw std::runtime_error("write failed for " + path.string());
  }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

void write_json(const fs::path& path, const json& value) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << value.dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

// Per-n base seed, so the replicate streams of different n never coincide.
std::uint64_t seed_for_n(const ExperimentConfig& c, long long n) {
  return derive_seed(c.seed, string_tag(to_string(c.experiment)), static_cast<std::uint64_t>(n));
}

struct Outcome {
  explicit Outcome(CsvTable table) : replicates(std::move(table)) {}

  CsvTable replicates;
  json results = json::array();
  std::uint64_t rng_draws = 0;
  long long replicate_count = 0;
  std::optional<CsvTable> ternary;
  json extra = json::object();
};

json threshold_map(const std::map<double, double>& values) {
  json out = json::object();
  for (const auto& [t, v] : values) out[threshold_key(t)] = v;
  return out;
}

// ---------------------------------------------------------------------------
// Coin
// ---------------------------------------------------------------------------

coin::CoinComparison coin_comparison(const ExperimentConfig& c) {
  coin::CoinComparison cmp{c.p_true, c.p1, c.p2};
  coin::validate(cmp);
  return cmp;
}

Outcome run_coin_exact(const ExperimentConfig& c) {
  const auto cmp = coin_comparison(c);
  const auto bound = coin::nonextreme_threshold(c.alpha, cmp);
  Outcome out{CsvTable({"seed", "n", "prob_nonextreme", "prob_nonextreme_normal",
                        "prob_nonextreme_small_n"})};
  for (long long n : c.n) {
    const double exact = coin::prob_nonextreme_exact(n, c.alpha, cmp);
    json r{{"n", n}, {"prob_nonextreme", exact}};
    std::string normal = "", small = "";
    if (cmp.symmetric() && cmp.p_true == 0.5) {
      const auto approx = coin::prob_nonextreme_normal(n, c.alpha, cmp);
      r["prob_nonextreme_normal"] = approx.normal;
      r["prob_nonextreme_small_n"] = approx.small_n;
      normal = num(approx.normal);
      small = num(approx.small_n);
    }
    out.replicates.add({std::to_string(c.seed), std::to_string(n), num(exact), normal, small});
    out.results.push_back(std::move(r));
  }
  out.extra["alpha"] = c.alpha;
  if (bound.b) out.extra["bound_b"] = *bound.b;
  return out;
}

Outcome run_coin_simulate(const ExperimentConfig& c) {
  const auto cmp = coin_comparison(c);
  Outcome out{CsvTable({"seed", "n", "p1", "p2", "x"})};
  for (long long n : c.n) {
    const auto reps = coin::simulate_coin_replicates(cmp, n, c.reps, seed_for_n(c, n));
    std::vector<std::vector<double>> samples;
    long long nonextreme = 0;
    for (const auto& r : reps) {
      const double p2 = 1.0 - r.p1;
      out.replicates.add({std::to_string(r.seed), std::to_string(n), num(r.p1), num(p2), std::to_string(r.x)});
      samples.push_back({r.p1, p2});
      nonextreme += (r.p1 > c.alpha && r.p1 < 1.0 - c.alpha);
      out.rng_draws += r.rng_draws;
    }
    out.replicate_count += static_cast<long long>(reps.size());
    const auto stats = summarize_replicates(samples, c.thresholds);
    const double p = static_cast<double>(nonextreme) / c.reps;
    out.results.push_back({{"n", n},
                           {"stats", to_json(stats)},
                           {"prob_nonextreme", p},
                           {"prob_nonextreme_se", std::sqrt(p * (1.0 - p) / c.reps)}});
  }
  out.extra["alpha"] = c.alpha;
  return out;
}

Outcome run_coin_scan(const ExperimentConfig& c) {
  const auto cmp = coin_comparison(c);
  std::vector<long long> grid = c.n;
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  const auto records = coin::overconfidence_scan(cmp, c.threshold, grid);

  Outcome out{CsvTable({"seed", "n", "prob_p2_extreme", "prob_p1_extreme", "prob_nonextreme"})};
  const double level = 1.0 - c.threshold;
  json runs = json::array();
  bool open = false;
  long long first = 0, last = 0, best_first = 0, best_last = -1;
  auto close_run = [&] {
    if (!open) return;
    runs.push_back({first, last});
    if (last - first > best_last - best_first) {
      best_first = first;
      best_last = last;
    }
    open = false;
  };
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    out.replicates.add({std::to_string(c.seed), std::to_string(r.n), num(r.prob_p2_extreme),
                        num(r.prob_p1_extreme), num(r.prob_nonextreme)});
    out.results.push_back({{"n", r.n},
                           {"prob_p2_extreme", r.prob_p2_extreme},
                           {"prob_p1_extreme", r.prob_p1_extreme},
                           {"prob_nonextreme", r.prob_nonextreme}});
    const bool inside = r.prob_p2_extreme > level;
    const bool consecutive = i > 0 && r.n == records[i - 1].n + 1;
    if (inside && open && consecutive) {
      last = r.n;
    } else {
      close_run();
      if (inside) {
        open = true;
        first = last = r.n;
      }
    }
  }
  close_run();
  out.extra["threshold"] = c.threshold;
  out.extra["overconfident_level"] = level;
  out.extra["overconfident_runs"] = runs;
  if (best_last >= best_first) {
    out.extra["longest_overconfident_run"] = {{"first", best_first}, {"last", best_last}};
  }
  return out;
}

// ---------------------------------------------------------------------------
// Gaussian balance
// ---------------------------------------------------------------------------

double ks_distance(std::vector<double> sample, const std::function<double(double)>& cdf) {
  std::sort(sample.begin(), sample.end());
  const double m = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max({d, static_cast<double>(i + 1) / m - f, f - static_cast<double>(i) / m});
  }
  return d;
}

Outcome run_balance_sign(const ExperimentConfig& c) {
  Outcome out{CsvTable({"seed", "n", "p1", "p2", "xbar"})};
  for (long long n : c.n) {
    const balance::SignModelConfig cfg{c.tau, c.xi, n};
    const auto reps = balance::simulate_balance_replicates(cfg, c.reps, seed_for_n(c, n));
    std::vector<std::vector<double>> samples;
    std::vector<double> p1s;
    for (const auto& r : reps) {
      out.replicates.add({std::to_string(r.seed), std::to_string(n), num(r.p1), num(1.0 - r.p1), num(r.xbar)});
      samples.push_back({r.p1, 1.0 - r.p1});
      p1s.push_back(r.p1);
      out.rng_draws += r.rng_draws;
    }
    out.replicate_count += static_cast<long long>(reps.size());
    const double ks = ks_distance(p1s, [&](double p) { return balance::cdf_p1_sign(p, cfg); });
    out.results.push_back({{"n", n}, {"stats", to_json(summarize_replicates(samples, c.thresholds))},
                           {"ks_distance", ks}});
  }
  return out;
}

json per_model_above(const std::vector<double>& p1s, std::span<const double> thresholds) {
  json out = json::object();
  const double reps = static_cast<double>(p1s.size());
  for (int model = 1; model <= 2; ++model) {
    json above = json::object();
    json se = json::object();
    for (double t : thresholds) {
      const auto hits = std::count_if(p1s.begin(), p1s.end(), [&](double p1) {
        return (model == 1 ? p1 : 1.0 - p1) > t;
      });
      const double p = static_cast<double>(hits) / reps;
      above[threshold_key(t)] = p;
      se[threshold_key(t)] = std::sqrt(p * (1.0 - p) / reps);
    }
    out[std::to_string(model)] = {{"prob_above", above}, {"mc_se", se}};
  }
  return out;
}

Outcome run_balance_var(const ExperimentConfig& c) {
  Outcome out{CsvTable({"seed", "n", "p1", "p2", "xbar", "s2"})};
  for (long long n : c.n) {
    const balance::VariancePairConfig cfg{c.tau1, c.tau2, c.xi, n};
    const auto reps = balance::simulate_balance_replicates(cfg, c.reps, seed_for_n(c, n));
    std::vector<std::vector<double>> samples;
    std::vector<double> p1s;
    for (const auto& r : reps) {
      out.replicates.add({std::to_string(r.seed), std::to_string(n), num(r.p1), num(1.0 - r.p1),
                          num(r.xbar), num(r.s2)});
      samples.push_back({r.p1, 1.0 - r.p1});
      p1s.push_back(r.p1);
      out.rng_draws += r.rng_draws;
    }
    out.replicate_count += static_cast<long long>(reps.size());
    out.results.push_back({{"n", n},
                           {"stats", to_json(summarize_replicates(samples, c.thresholds))},
                           {"per_model", per_model_above(p1s, c.thresholds)}});
  }
  out.extra["kl_model1"] = balance::kl_gaussian_precision(c.tau1);
  out.extra["kl_model2"] = balance::kl_gaussian_precision(c.tau2);
  return out;
}

double sample_sd(const std::vector<double>& v) {
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
}

Outcome run_decomposition(const ExperimentConfig& c) {
  Outcome out{CsvTable({"seed", "n", "p1", "p2", "xbar", "s2", "delta_a", "delta_b", "delta_c"})};
  const double log_2pi = std::log(2.0 * std::numbers::pi);
  std::vector<double> log_n;
  std::array<std::vector<double>, 3> log_sd;
  for (long long n : c.n) {
    const balance::VariancePairConfig cfg{c.tau1, c.tau2, c.xi, n};
    const auto reps = balance::simulate_balance_replicates(cfg, c.reps, seed_for_n(c, n));
    const double nn = static_cast<double>(n);
    std::array<std::vector<double>, 3> deltas;
    for (const auto& r : reps) {
      const balance::GaussianSummary s{n, r.xbar, r.s2};
      const double sum_sq = nn * (r.s2 + r.xbar * r.xbar);
      const double log_g = -0.5 * nn * log_2pi - 0.5 * sum_sq;
      std::array<selection::DecompositionTerms, 2> terms;
      for (int k = 0; k < 2; ++k) {
        const double tau = k == 0 ? c.tau1 : c.tau2;
        const double log_m = balance::log_marginal_variance_model(s, tau, c.xi);
        const double log_norm = 0.5 * nn * (std::log(tau) - log_2pi);
        // MLE of the mean is xbar; the pseudo-true mean is 0.
        const double at_mle = log_norm - 0.5 * tau * nn * r.s2;
        const double at_star = log_norm - 0.5 * tau * sum_sq;
        terms[k] = selection::decompose_log_marginal(log_m, at_mle, at_star, log_g);
      }
      const double da = terms[0].a - terms[1].a;
      const double db = terms[0].b - terms[1].b;
      const double dc = terms[0].c - terms[1].c;
      deltas[0].push_back(da);
      deltas[1].push_back(db);
      deltas[2].push_back(dc);
      out.replicates.add({std::to_string(r.seed), std::to_string(n), num(r.p1), num(1.0 - r.p1),
                          num(r.xbar), num(r.s2), num(da), num(db), num(dc)});
      out.rng_draws += r.rng_draws;
    }
    out.replicate_count += static_cast<long long>(reps.size());
    json sds = json::object();
    const char* names[3] = {"delta_a", "delta_b", "delta_c"};
    for (int k = 0; k < 3; ++k) {
      const double sd = sample_sd(deltas[k]);
      sds[names[k]] = sd;
      log_sd[k].push_back(std::log(sd));
    }
    log_n.push_back(std::log(nn));
    out.results.push_back({{"n", n}, {"sd", sds}});
  }
  if (log_n.size() >= 2) {
    const double mx = std::accumulate(log_n.begin(), log_n.end(), 0.0) / static_cast<double>(log_n.size());
    json slopes = json::object();
    const char* names[3] = {"delta_a", "delta_b", "delta_c"};
    for (int k = 0; k < 3; ++k) {
      const double my = std::accumulate(log_sd[k].begin(), log_sd[k].end(), 0.0) /
                        static_cast<double>(log_n.size());
      double sxy = 0.0, sxx = 0.0;
      for (std::size_t i = 0; i < log_n.size(); ++i) {
        sxy += (log_n[i] - mx) * (log_sd[k][i] - my);
        sxx += (log_n[i] - mx) * (log_n[i] - mx);
      }
      slopes[names[k]] = sxx > 0.0 ? sxy / sxx : 0.0;
    }
    out.extra["sd_growth_slope"] = slopes;
  }
  const double d1 = balance::kl_gaussian_precision(c.tau1);
  const double d2 = balance::kl_gaussian_precision(c.tau2);
  selection::ComparisonStructure structure{true, 1, 1, d1 - d2, false};
  out.extra["kl_model1"] = d1;
  out.extra["kl_model2"] = d2;
  out.extra["behavior"] = std::string(selection::to_string(selection::classify_behavior(structure)));
  return out;
}

// ---------------------------------------------------------------------------
// Trees
// ---------------------------------------------------------------------------

phylo::RateModel generating_rates(const ExperimentConfig& c) {
  return std::isinf(c.gamma_alpha) ? phylo::RateModel::jc() : phylo::RateModel::gamma(c.gamma_alpha);
}

CsvTable ternary_table(const std::vector<std::pair<long long, TernaryHistogram>>& histograms) {
  CsvTable t({"n", "row", "column", "orientation", "p1", "p2", "p3", "count"});
  for (const auto& [n, h] : histograms) {
    for (int row = 0; row < h.bins(); ++row) {
      for (int column = 0; column <= 2 * row; ++column) {
        const auto centre = h.centroid(row, column);
        t.add({std::to_string(n), std::to_string(row), std::to_string(column), column % 2 ? "down" : "up",
               num(centre[0]), num(centre[1]), num(centre[2]), std::to_string(h.count(row, column))});
      }
    }
  }
  return t;
}

struct TreeReplicate {
  std::uint64_t seed = 0;
  phylo::SitePatternCounts counts;
  phylo::TreePosterior posterior;
  std::uint64_t draws = 0;
};

std::vector<std::string> tree_header(int classes, bool mcmc) {
  std::vector<std::string> h{"seed", "n", "p1", "p2", "p3"};
  if (mcmc) {
    for (const char* s : {"chain_gap", "converged", "acc_topology", "acc_branch"}) h.emplace_back(s);
  }
  for (int j = 0; j < classes; ++j) h.push_back("c" + std::to_string(j));
  return h;
}

Outcome run_tree_experiment(const ExperimentConfig& c) {
  const bool three_taxa =
      c.experiment == ExperimentKind::Star3Right || c.experiment == ExperimentKind::Star3WrongIndistinct;
  const auto rates = generating_rates(c);
  std::vector<double> q;
  std::optional<phylo::ClockQuadrature3> quadrature;
  if (three_taxa) {
    const auto p = phylo::pattern_probs_3taxon(phylo::Topology3::Star, {0.0, c.branch_length}, rates);
    q.assign(p.begin(), p.end());
    quadrature.emplace(c.prior, c.quadrature_points);
  } else {
    phylo::Tree4 tree{c.experiment == ExperimentKind::Table2 ? phylo::Topology4::T1 : phylo::Topology4::Star,
                      {c.internal_length, c.branch_length, c.branch_length, c.branch_length, c.branch_length}};
    const auto p = phylo::pattern_probs_4taxon(tree, rates);
    q.assign(p.begin(), p.end());
  }

  Outcome out{CsvTable(tree_header(static_cast<int>(q.size()), !three_taxa))};
  std::vector<std::pair<long long, TernaryHistogram>> histograms;
  const std::uint64_t mcmc_tag = string_tag("mcmc");
  for (long long n : c.n) {
    const std::uint64_t base = seed_for_n(c, n);
    std::vector<TreeReplicate> reps(static_cast<std::size_t>(c.reps));
    parallel_for(reps.size(), c.workers, [&](std::size_t i) {
      TreeReplicate& r = reps[i];
      r.seed = derive_seed(base, string_tag("replicate"), i);
      CountingEngine rng(r.seed);
      r.counts = phylo::simulate_alignment(q, n, rng);
      r.draws = rng.draws();
      if (three_taxa) {
        r.posterior = quadrature->posteriors(r.counts);
      } else {
        phylo::McmcConfig mcmc = c.mcmc;
        mcmc.seed = derive_seed(r.seed, mcmc_tag, 0);
        r.posterior = phylo::mcmc_tree_posteriors_4taxon(r.counts, c.prior, mcmc);
        r.draws += static_cast<std::uint64_t>(r.posterior.diagnostics.at("rng_draws"));
      }
    });

    std::vector<std::vector<double>> samples;
    std::vector<std::array<double, 3>> points;
    long long converged = 0;
    std::array<long long, 2> p1_below{};   // P1 < 0.01, P1 < 0.05
    std::array<long long, 2> p23_above{};  // max(P2, P3) > 0.95, > 0.99
    for (const auto& r : reps) {
      const auto& p = r.posterior.p;
      std::vector<std::string> row{std::to_string(r.seed), std::to_string(n), num(p[0]), num(p[1]), num(p[2])};
      if (!three_taxa) {
        const auto& d = r.posterior.diagnostics;
        row.push_back(num(d.at("chain_gap")));
        row.push_back(r.posterior.converged ? "1" : "0");
        row.push_back(num(d.at("acc_topology")));
        row.push_back(num(d.at("acc_branch")));
      }
      for (long long k : r.counts.counts) row.push_back(std::to_string(k));
      out.replicates.add(std::move(row));
      samples.push_back({p[0], p[1], p[2]});
      points.push_back(p);
      converged += r.posterior.converged;
      p1_below[0] += p[0] < 0.01;
      p1_below[1] += p[0] < 0.05;
      p23_above[0] += std::max(p[1], p[2]) > 0.95;
      p23_above[1] += std::max(p[1], p[2]) > 0.99;
      out.rng_draws += r.draws;
    }
    out.replicate_count += c.reps;
    const double reps_d = static_cast<double>(c.reps);
    json result{{"n", n}, {"stats", to_json(summarize_replicates(samples, c.thresholds))}};
    if (!three_taxa) result["converged_fraction"] = static_cast<double>(converged) / reps_d;
    if (c.experiment == ExperimentKind::Table2) {
      result["prob_p1_below"] = {{"0.01", p1_below[0] / reps_d}, {"0.05", p1_below[1] / reps_d}};
      result["prob_p23_above"] = {{"0.95", p23_above[0] / reps_d}, {"0.99", p23_above[1] / reps_d}};
    }
    auto hist = ternary_histogram(points, c.ternary_bins);
    const auto centre = hist.cell_of({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
    result["central_cell_fraction"] = static_cast<double>(hist.count(centre.first, centre.second)) / reps_d;
    out.results.push_back(std::move(result));
    histograms.emplace_back(n, std::move(hist));
  }
  out.ternary = ternary_table(histograms);
  out.extra["generating_pattern_probs"] = q;
  return out;
}

Outcome dispatch(const ExperimentConfig& c) {
  switch (c.experiment) {
    case ExperimentKind::Coin:
      return c.exact ? run_coin_exact(c) : run_coin_simulate(c);
    case ExperimentKind::CoinScan:
      return run_coin_scan(c);
    case ExperimentKind::BalanceSign:
      return run_balance_sign(c);
    case ExperimentKind::BalanceVar:
      return run_balance_var(c);
    case ExperimentKind::DecompositionDemo:
      return run_decomposition(c);
    case ExperimentKind::Star3Right:
    case ExperimentKind::Star3WrongIndistinct:
    case ExperimentKind::Star4WrongDistinct:
    case ExperimentKind::Table1:
    case ExperimentKind::Table2:
      return run_tree_experiment(c);
  }
  throw std::logic_error("unhandled experiment");
}

}  // namespace

std::string threshold_key(double threshold) {
  std::ostringstream out;
  out << std::setprecision(15) << threshold;
  return out.str();
}

json to_json(const SummaryStats& s) {
  json se = json::object();
  for (const auto& [name, values] : s.mc_se) {
    if (name == "mean_min" || name == "mean_max") {
      se[name] = values.at(0.0);
    } else {
      se[name] = threshold_map(values);
    }
  }
  return {{"reps", s.reps},
          {"prob_min_below", threshold_map(s.prob_min_below)},
          {"prob_max_above", threshold_map(s.prob_max_above)},
          {"mean_min", s.mean_min},
          {"mean_max", s.mean_max},
          {"mc_se", se}};
}

json to_json(const ExperimentConfig& c) {
  json out{{"experiment", std::string(to_string(c.experiment))},
           {"n", c.n},
           {"reps", c.reps},
           {"seed", c.seed},
           {"output_dir", c.output_dir.string()},
           {"workers", c.workers},
           {"thresholds", c.thresholds}};
  auto number = [](double v) -> json {
    if (std::isinf(v)) return "inf";
    return v;
  };
  switch (c.experiment) {
    case ExperimentKind::Coin:
    case ExperimentKind::CoinScan:
      out["mode"] = c.exact ? "exact" : "simulate";
      out["p_true"] = c.p_true;
      out["p1"] = c.p1;
      out["p2"] = c.p2;
      out["alpha"] = c.alpha;
      out["threshold"] = c.threshold;
      break;
    case ExperimentKind::BalanceSign:
      out["tau"] = c.tau;
      out["xi"] = c.xi;
      break;
    case ExperimentKind::BalanceVar:
    case ExperimentKind::DecompositionDemo:
      out["tau1"] = c.tau1;
      out["tau2"] = c.tau2;
      out["xi"] = c.xi;
      break;
    case ExperimentKind::Star3Right:
    case ExperimentKind::Star3WrongIndistinct:
      out["branch_length"] = c.branch_length;
      out["gamma_alpha"] = number(c.gamma_alpha);
      out["prior_mean_t0"] = c.prior.mean_t0;
      out["prior_mean_t1"] = c.prior.mean_t1;
      out["quadrature_points"] = c.quadrature_points;
      out["ternary_bins"] = c.ternary_bins;
      break;
    case ExperimentKind::Star4WrongDistinct:
    case ExperimentKind::Table1:
    case ExperimentKind::Table2:
      out["branch_length"] = c.branch_length;
      out["internal_length"] = c.internal_length;
      out["gamma_alpha"] = number(c.gamma_alpha);
      out["prior_mean_all"] = c.prior.mean_all;
      out["mcmc_iterations"] = c.mcmc.iterations;
      out["mcmc_chains"] = c.mcmc.chains;
      out["mcmc_burn_in"] = c.mcmc.burn_in_fraction;
      out["mcmc_topology_move_prob"] = c.mcmc.topology_move_prob;
      out["mcmc_convergence_threshold"] = c.mcmc.convergence_threshold;
      out["ternary_bins"] = c.ternary_bins;
      break;
  }
  return out;
}

RunReport run_experiment(const ExperimentConfig& config) {
  validate(config);
  const auto start = std::chrono::steady_clock::now();
  const fs::path dir = config.output_dir;
  fs::create_directories(dir);
  const fs::path marker = dir / "FAILED";
  fs::remove(marker);

  try {
    Outcome outcome = dispatch(config);
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    json summary{{"experiment", std::string(to_string(config.experiment))},
                 {"config", to_json(config)},
                 {"results", outcome.results},
                 {"wall_time_seconds", wall}};
    for (auto& [k, v] : outcome.extra.items()) summary[k] = v;

    outcome.replicates.write(dir / "replicates.csv");
    if (outcome.ternary) outcome.ternary->write(dir / "ternary.csv");
    write_json(dir / "summary.json", summary);
    write_json(dir / "meta.json", {{"artifact", "paradox"},
                                   {"version", PARADOX_VERSION},
                                   {"experiment", std::string(to_string(config.experiment))},
                                   {"seed", config.seed},
                                   {"replicates", outcome.replicate_count},
                                   {"total_rng_draws", outcome.rng_draws}});

    RunReport report;
    report.output_dir = dir;
    report.summary = std::move(summary);
    report.rng_draws = outcome.rng_draws;
    report.replicates = outcome.replicate_count;
    report.wall_seconds = wall;
    return report;
  } catch (const std::exception& e) {
    std::ofstream(marker) << e.what() << '\n';
    throw;
  }
}

}  // namespace paradox::experiments
