#pragma once

// Jukes-Cantor (optionally gamma-rate) likelihoods for three- and four-taxon
// trees, pattern-count simulation, pseudo-true branch lengths, quadrature
// marginal likelihoods for clock trees and topology MCMC for unrooted trees.

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "paradox/numerics.hpp"

namespace paradox::phylo {

// ---------------------------------------------------------------------------
// Trees, rates, data
// ---------------------------------------------------------------------------

/// Rooted clock trees for taxa (a, b, c):
/// T1 = ((a,b),c), T2 = ((b,c),a), T3 = ((c,a),b), Star = (a,b,c).
enum class Topology3 { T1, T2, T3, Star };

/// t0: internal branch (root to cherry ancestor); t1: cherry ancestor to its
/// tips. The outgroup hangs at depth t0 + t1. The star uses t1 only.
struct ClockBranchLengths {
  double t0 = 0.0;
  double t1 = 0.0;
};

/// Unrooted trees for taxa (a, b, c, d):
/// T1 = ((a,b),(c,d)), T2 = ((a,c),(b,d)), T3 = ((a,d),(b,c)), Star.
enum class Topology4 { T1, T2, T3, Star };

/// branch_lengths[0] is the internal branch (ignored for the star);
/// branch_lengths[1..4] are the pendant branches of a, b, c, d.
struct Tree4 {
  Topology4 topology = Topology4::Star;
  std::array<double, 5> branch_lengths{};
};

/// Gamma(alpha, alpha) site rates with mean 1; alpha = inf is plain JC.
class RateModel {
 public:
  static RateModel jc();
  static RateModel gamma(double alpha, int points = 128);

  double alpha() const noexcept { return alpha_; }
  bool plain_jc() const noexcept { return alpha_ == kInf; }
  const std::vector<double>& rates() const noexcept { return rates_; }
  const std::vector<double>& weights() const noexcept { return weights_; }

 private:
  RateModel(double alpha, std::vector<double> rates, std::vector<double> weights)
      : alpha_(alpha), rates_(std::move(rates)), weights_(std::move(weights)) {}

  double alpha_;
  std::vector<double> rates_;
  std::vector<double> weights_;
};

inline constexpr int kClasses3 = 5;
inline constexpr int kClasses4 = 15;
using PatternProbs3 = std::array<double, kClasses3>;
using PatternProbs4 = std::array<double, kClasses4>;

/// Counts over pattern classes: 5 for three taxa (xxx, xxy, yxx, xyx, xyz),
/// 15 for four taxa (set partitions, see pattern_class_labels_4taxon).
struct SitePatternCounts {
  int taxa = 3;
  std::vector<long long> counts;

  long long total() const;
};

void validate(const SitePatternCounts& counts);

/// Exponential branch-length priors. mean_t0 / mean_t1 apply to clock trees,
/// mean_all to every branch of an unrooted four-taxon tree.
struct PhyloPrior {
  double mean_t0 = 0.1;
  double mean_t1 = 0.2;
  double mean_all = 0.1;
};

struct TreePosterior {
  std::array<double, 3> p{};
  std::map<std::string, double> diagnostics;
  bool converged = true;
};

// ---------------------------------------------------------------------------
// Pattern probabilities
// ---------------------------------------------------------------------------

struct JcTransition {
  double p_same;
  double p_diff;
};

JcTransition jc_transition(double t, double rate = 1.0);

/// Class of the nucleotide triple (a, b, c) in xxx, xxy, yxx, xyx, xyz order.
int pattern_class_3taxon(int a, int b, int c);
const std::array<int, kClasses3>& class_multiplicities_3taxon();

/// Class of a nucleotide 4-tuple. Classes are set partitions labelled by
/// order of first appearance ("aaaa", "aaab", ..., "abcd") in lexicographic order.
int pattern_class_4taxon(const std::array<int, 4>& tuple);
const std::array<int, kClasses4>& class_multiplicities_4taxon();
const std::array<std::string, kClasses4>& pattern_class_labels_4taxon();

PatternProbs3 pattern_probs_3taxon(Topology3 topology, const ClockBranchLengths& bl,
                                   const RateModel& rates);

/// Probabilities of all 256 nucleotide 4-tuples, index a*64 + b*16 + c*4 + d.
std::array<double, 256> raw_pattern_probs_4taxon(const Tree4& tree, const RateModel& rates);

/// Class probabilities (multiplicities included); collapses the 256 raw patterns.
PatternProbs4 pattern_probs_4taxon(const Tree4& tree, const RateModel& rates);

/// Same values as pattern_probs_4taxon, evaluated from one representative per
/// class. This is the path used inside MCMC.
PatternProbs4 class_probs_4taxon_fast(const Tree4& tree, const RateModel& rates);

// ---------------------------------------------------------------------------
// Data and likelihood
// ---------------------------------------------------------------------------

/// Multinomial draw of n sites over the classes of `pattern_probs` (size 5 or 15).
SitePatternCounts simulate_alignment(std::span<const double> pattern_probs, long long n,
                                     CountingEngine& rng);
SitePatternCounts simulate_alignment(std::span<const double> pattern_probs, long long n,
                                     std::uint64_t seed);

/// Sum of count * log p. Returns -inf when a class with a positive count has p = 0.
double log_likelihood(const SitePatternCounts& counts, std::span<const double> pattern_probs);

// ---------------------------------------------------------------------------
// Pseudo-true parameters
// ---------------------------------------------------------------------------

struct FitResult {
  std::vector<double> theta;  // 3 taxa: (t0, t1); 4 taxa: (t0, ta, tb, tc, td)
  double objective = 0.0;     // sum_j q_j log p_j(theta)
  std::vector<bool> at_boundary;
  int evaluations = 0;
};

/// Maximizes sum_j q_j log p_j(theta) over theta >= 0, where q is the class
/// distribution of the generating tree. Minimizes the K-L divergence.
FitResult best_fit_params(Topology3 topology, const RateModel& generating_rates,
                          const RateModel& analysis_rates, const ClockBranchLengths& generating_bl,
                          Topology3 generating_topology = Topology3::Star);

FitResult best_fit_params(Topology4 topology, const RateModel& generating_rates,
                          const RateModel& analysis_rates, const Tree4& generating_tree);

/// Lower-level entry: fit against an explicit class distribution.
FitResult fit_to_distribution(Topology3 topology, const RateModel& analysis_rates,
                              const PatternProbs3& expected);
FitResult fit_to_distribution(Topology4 topology, const RateModel& analysis_rates,
                              const PatternProbs4& expected);

// ---------------------------------------------------------------------------
// Marginal likelihoods and tree posteriors
// ---------------------------------------------------------------------------

/// Gauss-Legendre grid over (t0, t1) after u = 1 - exp(-t / mean), for JC
/// analysis of three-taxon clock trees. Build once, evaluate many datasets.
class ClockQuadrature3 {
 public:
  ClockQuadrature3(const PhyloPrior& prior, int points_per_dim,
                   const RateModel& analysis_rates = RateModel::jc());

  double log_marginal(const SitePatternCounts& counts, Topology3 topology) const;
  TreePosterior posteriors(const SitePatternCounts& counts) const;

 private:
  // Per grid node: log(w0 w1) and log p of xxx, cherry-equal, other-equal, xyz.
  struct Node {
    double log_weight;
    std::array<double, 4> log_p;
  };
  std::vector<Node> nodes_;
};

double log_marginal_quadrature_3taxon(const SitePatternCounts& counts, Topology3 topology,
                                      const PhyloPrior& prior, int points_per_dim = 128);

TreePosterior tree_posteriors_3taxon(const SitePatternCounts& counts, const PhyloPrior& prior,
                                     int points_per_dim = 128);

struct McmcConfig {
  long long iterations = 200000;
  double burn_in_fraction = 0.25;
  std::uint64_t seed = 1;
  int chains = 2;
  double topology_move_prob = 0.2;
  double convergence_threshold = 0.02;
};

/// Metropolis-Hastings over (topology, five branch lengths) under JC with
/// exponential(mean_all) priors and a uniform topology prior. The posterior
/// is the pooled post-burn-in topology visit frequency. Diagnostics:
/// chain_gap, acc_topology, acc_branch, rng_draws.
TreePosterior mcmc_tree_posteriors_4taxon(const SitePatternCounts& counts,
                                          const PhyloPrior& prior, const McmcConfig& config);

struct ImportanceEstimate {
  double estimate;
  double mc_se;
  double ess;
  bool low_ess;  // ess < 100
};

/// Prior-sampling estimate of log M for one unrooted topology under JC.
ImportanceEstimate importance_log_marginal_4taxon(const SitePatternCounts& counts,
                                                  Topology4 topology, const PhyloPrior& prior,
                                                  long long samples, std::uint64_t seed);

}  // namespace paradox::phylo
