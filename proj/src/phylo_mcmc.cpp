#include <algorithm>
#include <cmath>
#include <random>

#include "paradox/phylo.hpp"

namespace paradox::phylo {

namespace {

constexpr double kMinMultiplierWidth = 0.01;
constexpr double kMaxMultiplierWidth = 10.0;
constexpr int kTuneBatch = 100;

struct ChainResult {
  std::array<long long, 3> visits{};
  long long topology_proposed = 0;
  long long topology_accepted = 0;
  long long branch_proposed = 0;
  long long branch_accepted = 0;
  std::uint64_t draws = 0;
};

class JcLikelihood4 {
 public:
  explicit JcLikelihood4(const SitePatternCounts& counts) {
    for (int j = 0; j < kClasses4; ++j) {
      if (counts.counts[j] > 0) observed_.push_back({j, static_cast<double>(counts.counts[j])});
    }
  }

  double operator()(int topology, const std::array<double, 5>& bl) const {
    const PatternProbs4 p = class_probs_4taxon_fast({static_cast<Topology4>(topology), bl}, jc_);
    double total = 0.0;
    for (const auto& [j, c] : observed_) total += c * std::log(p[j]);
    return total;
  }

 private:
  struct Observed {
    int index;
    double count;
  };
  std::vector<Observed> observed_;
  RateModel jc_ = RateModel::jc();
};

ChainResult run_chain(const JcLikelihood4& log_like, double prior_mean, const McmcConfig& config,
                      std::uint64_t seed) {
  CountingEngine rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::uniform_int_distribution<int> pick_branch(0, 4);
  std::uniform_int_distribution<int> pick_topology(0, 2);
  std::exponential_distribution<double> prior_draw(1.0 / prior_mean);

  int topology = pick_topology(rng);
  std::array<double, 5> bl{};
  for (double& t : bl) t = prior_draw(rng);
  double ll = log_like(topology, bl);

  std::array<double, 5> width;
  width.fill(1.0);
  std::array<int, 5> batch_proposed{};
  std::array<int, 5> batch_accepted{};

  const auto burn_in = static_cast<long long>(config.burn_in_fraction * static_cast<double>(config.iterations));
  ChainResult out;
  for (long long it = 0; it < config.iterations; ++it) {
    const bool sampling = it >= burn_in;
    if (unif(rng) < config.topology_move_prob) {
      // NNI: each binary topology neighbours the other two. Branch lengths stay
      // attached to the same taxa, so the proposal is symmetric.
      const int proposed = (topology + 1 + static_cast<int>(unif(rng) < 0.5)) % 3;
      const double ll_new = log_like(proposed, bl);
      if (sampling) ++out.topology_proposed;
      if (std::log(unif(rng)) < ll_new - ll) {
        topology = proposed;
        ll = ll_new;
        if (sampling) ++out.topology_accepted;
      }
    } else {
      const int i = pick_branch(rng);
      const double m = std::exp(width[i] * (unif(rng) - 0.5));
      std::array<double, 5> proposal = bl;
      proposal[i] = bl[i] * m;
      const double ll_new = log_like(topology, proposal);
      // Exponential prior ratio plus the multiplier's Jacobian m.
      const double log_ratio = ll_new - ll - (proposal[i] - bl[i]) / prior_mean + std::log(m);
      const bool accepted = std::log(unif(rng)) < log_ratio;
      if (accepted) {
        bl = proposal;
        ll = ll_new;
      }
      if (sampling) {
        ++out.branch_proposed;
        out.branch_accepted += accepted;
      } else {
        ++batch_proposed[i];
        batch_accepted[i] += accepted;
        if (batch_proposed[i] == kTuneBatch) {
          const double rate = static_cast<double>(batch_accepted[i]) / kTuneBatch;
          width[i] = std::clamp(width[i] * std::exp(2.0 * (rate - 0.35)), kMinMultiplierWidth,
                                kMaxMultiplierWidth);
          batch_proposed[i] = 0;
          batch_accepted[i] = 0;
        }
      }
    }
    if (sampling) ++out.visits[topology];
  }
  out.draws = rng.draws();
  return out;
}

}  // namespace

TreePosterior mcmc_tree_posteriors_4taxon(const SitePatternCounts& counts, const PhyloPrior& prior,
                                          const McmcConfig& config) {
  validate(counts);
  if (counts.taxa != 4) throw DomainError("mcmc_tree_posteriors_4taxon: four-taxon counts required");
  if (config.chains < 1) throw DomainError("mcmc_tree_posteriors_4taxon: chains >= 1");
  if (!(config.burn_in_fraction >= 0.0 && config.burn_in_fraction < 1.0)) {
    throw DomainError("mcmc_tree_posteriors_4taxon: burn-in fraction must lie in [0, 1)");
  }
  if (config.iterations < 1 ||
      static_cast<long long>(config.burn_in_fraction * static_cast<double>(config.iterations)) >=
          config.iterations) {
    throw DomainError("mcmc_tree_posteriors_4taxon: no post-burn-in iterations");
  }
  if (!(prior.mean_all > 0.0)) throw DomainError("mcmc_tree_posteriors_4taxon: prior mean > 0");

  const JcLikelihood4 log_like(counts);
  const std::uint64_t tag = string_tag("mcmc4");
  std::vector<ChainResult> chains;
  for (int c = 0; c < config.chains; ++c) {
    chains.push_back(run_chain(log_like, prior.mean_all, config,
                               derive_seed(config.seed, tag, static_cast<std::uint64_t>(c))));
  }

  TreePosterior out;
  std::array<long long, 3> pooled{};
  long long topo_prop = 0, topo_acc = 0, br_prop = 0, br_acc = 0;
  std::uint64_t draws = 0;
  for (const auto& ch : chains) {
    for (int k = 0; k < 3; ++k) pooled[k] += ch.visits[k];
    topo_prop += ch.topology_proposed;
    topo_acc += ch.topology_accepted;
    br_prop += ch.branch_proposed;
    br_acc += ch.branch_accepted;
    draws += ch.draws;
  }
  const double total = static_cast<double>(pooled[0] + pooled[1] + pooled[2]);
  for (int k = 0; k < 3; ++k) out.p[k] = static_cast<double>(pooled[k]) / total;

  double gap = 0.0;
  for (std::size_t a = 0; a < chains.size(); ++a) {
    for (std::size_t b = a + 1; b < chains.size(); ++b) {
      const double na = static_cast<double>(chains[a].visits[0] + chains[a].visits[1] + chains[a].visits[2]);
      const double nb = static_cast<double>(chains[b].visits[0] + chains[b].visits[1] + chains[b].visits[2]);
      for (int k = 0; k < 3; ++k) {
        gap = std::max(gap, std::abs(static_cast<double>(chains[a].visits[k]) / na -
                                     static_cast<double>(chains[b].visits[k]) / nb));
      }
    }
  }
  out.diagnostics["chain_gap"] = gap;
  out.diagnostics["acc_topology"] = topo_prop > 0 ? static_cast<double>(topo_acc) / static_cast<double>(topo_prop) : 0.0;
  out.diagnostics["acc_branch"] = br_prop > 0 ? static_cast<double>(br_acc) / static_cast<double>(br_prop) : 0.0;
  out.diagnostics["rng_draws"] = static_cast<double>(draws);
  out.converged = gap <= config.convergence_threshold;
  return out;
}

}  // namespace paradox::phylo
