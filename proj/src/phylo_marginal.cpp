#include <algorithm>
#include <cmath>
#include <random>

#include "paradox/phylo.hpp"

namespace paradox::phylo {

ClockQuadrature3::ClockQuadrature3(const PhyloPrior& prior, int points_per_dim,
                                   const RateModel& analysis_rates) {
  if (!(prior.mean_t0 > 0.0) || !(prior.mean_t1 > 0.0)) {
    throw DomainError("ClockQuadrature3: prior means must be > 0");
  }
  const QuadratureRule rule = gauss_legendre_unit(points_per_dim);
  nodes_.reserve(rule.nodes.size() * rule.nodes.size());
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    // u = 1 - exp(-t / m) turns the exponential prior into U(0, 1).
    const double t0 = -prior.mean_t0 * std::log1p(-rule.nodes[i]);
    for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
      const double t1 = -prior.mean_t1 * std::log1p(-rule.nodes[j]);
      const PatternProbs3 p = pattern_probs_3taxon(Topology3::T1, {t0, t1}, analysis_rates);
      Node node{std::log(rule.weights[i]) + std::log(rule.weights[j]),
                {std::log(p[0]), std::log(p[1]), std::log(p[2]), std::log(p[4])}};
      for (double lp : node.log_p) {
        if (!std::isfinite(lp)) throw DomainError("ClockQuadrature3: non-finite integrand");
      }
      nodes_.push_back(node);
    }
  }
}

double ClockQuadrature3::log_marginal(const SitePatternCounts& counts, Topology3 topology) const {
  validate(counts);
  if (counts.taxa != 3) throw DomainError("ClockQuadrature3: three-taxon counts required");
  if (topology == Topology3::Star) throw DomainError("ClockQuadrature3: binary topology required");
  const auto& c = counts.counts;
  // Class index (xxy, yxx or xyx) of the pair that forms the cherry.
  const int cherry = 1 + static_cast<int>(topology);
  long long others = 0;
  for (int k = 1; k <= 3; ++k) {
    if (k != cherry) others += c[k];
  }
  const double n_same = static_cast<double>(c[0]);
  const double n_cherry = static_cast<double>(c[cherry]);
  const double n_other = static_cast<double>(others);
  const double n_diff = static_cast<double>(c[4]);

  std::vector<double> terms(nodes_.size());
  for (std::size_t k = 0; k < nodes_.size(); ++k) {
    const auto& lp = nodes_[k].log_p;
    // Skipping zero counts keeps 0 * log p exact.
    double ll = 0.0;
    if (n_same > 0) ll += n_same * lp[0];
    if (n_cherry > 0) ll += n_cherry * lp[1];
    if (n_other > 0) ll += n_other * lp[2];
    if (n_diff > 0) ll += n_diff * lp[3];
    terms[k] = nodes_[k].log_weight + ll;
  }
  const double value = log_sum_exp(terms);
  if (!std::isfinite(value)) throw DomainError("ClockQuadrature3: non-finite marginal likelihood");
  return value;
}

namespace {

TreePosterior softmax3(const std::array<double, 3>& log_m) {
  const double m = *std::max_element(log_m.begin(), log_m.end());
  TreePosterior out;
  double total = 0.0;
  for (int k = 0; k < 3; ++k) {
    out.p[k] = std::exp(log_m[k] - m);
    total += out.p[k];
  }
  for (double& p : out.p) p /= total;
  return out;
}

}  // namespace

TreePosterior ClockQuadrature3::posteriors(const SitePatternCounts& counts) const {
  return softmax3({log_marginal(counts, Topology3::T1), log_marginal(counts, Topology3::T2),
                   log_marginal(counts, Topology3::T3)});
}

double log_marginal_quadrature_3taxon(const SitePatternCounts& counts, Topology3 topology,
                                      const PhyloPrior& prior, int points_per_dim) {
  return ClockQuadrature3(prior, points_per_dim).log_marginal(counts, topology);
}

TreePosterior tree_posteriors_3taxon(const SitePatternCounts& counts, const PhyloPrior& prior,
                                     int points_per_dim) {
  return ClockQuadrature3(prior, points_per_dim).posteriors(counts);
}

ImportanceEstimate importance_log_marginal_4taxon(const SitePatternCounts& counts,
                                                  Topology4 topology, const PhyloPrior& prior,
                                                  long long samples, std::uint64_t seed) {
  validate(counts);
  if (counts.taxa != 4) throw DomainError("importance_log_marginal_4taxon: four-taxon counts required");
  if (samples < 10000) throw DomainError("importance_log_marginal_4taxon: need >= 1e4 samples");
  if (!(prior.mean_all > 0.0)) throw DomainError("importance_log_marginal_4taxon: prior mean > 0");

  const RateModel jc = RateModel::jc();
  CountingEngine rng(seed);
  std::exponential_distribution<double> branch(1.0 / prior.mean_all);
  std::vector<double> log_l(static_cast<std::size_t>(samples));
  for (auto& l : log_l) {
    Tree4 tree{topology, {}};
    for (double& t : tree.branch_lengths) t = branch(rng);
    l = log_likelihood(counts, class_probs_4taxon_fast(tree, jc));
  }

  const double m = *std::max_element(log_l.begin(), log_l.end());
  double sum_w = 0.0;
  double sum_w2 = 0.0;
  for (double l : log_l) {
    const double w = std::exp(l - m);
    sum_w += w;
    sum_w2 += w * w;
  }
  const double n = static_cast<double>(samples);
  const double mean_w = sum_w / n;
  const double var_w = std::max(0.0, sum_w2 / n - mean_w * mean_w) * n / (n - 1.0);
  ImportanceEstimate out;
  out.estimate = m + std::log(mean_w);
  out.mc_se = std::sqrt(var_w / n) / mean_w;
  out.ess = sum_w * sum_w / sum_w2;
  out.low_ess = out.ess < 100.0;
  return out;
}

}  // namespace paradox::phylo
