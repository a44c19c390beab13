#pragma once

// Fair-coin paradox: two point-mass binomial models H1: p = p1 and H2: p = p2
// compared under a uniform model prior, with data generated by p_true.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace paradox::coin {

struct CoinComparison {
  double p_true = 0.5;
  double p1 = 0.4;
  double p2 = 0.6;

  bool symmetric() const;  // p2 == 1 - p1
};

void validate(const CoinComparison& cmp);

struct CoinDataset {
  long long n = 0;
  long long x = 0;
};

/// log(P1 / P2) = x log(p1/p2) + (n - x) log((1-p1)/(1-p2)).
double coin_log_odds(const CoinDataset& data, const CoinComparison& cmp);

double coin_posterior(const CoinDataset& data, const CoinComparison& cmp);

/// x-bound a + b n.
struct LinearBound {
  double intercept;
  double slope;
  double at(long long n) const { return intercept + slope * static_cast<double>(n); }
};

/// alpha < P1 < 1 - alpha  <=>  lower.at(n) < x < upper.at(n).
/// For p2 = 1 - p1 this is |2x - n| < b.
struct NonextremeThreshold {
  std::optional<double> b;
  LinearBound lower;
  LinearBound upper;
};

NonextremeThreshold nonextreme_threshold(double alpha, const CoinComparison& cmp);

/// Exact P{alpha < P1 < 1 - alpha} under x ~ Binomial(n, p_true).
double prob_nonextreme_exact(long long n, double alpha, const CoinComparison& cmp);

struct NormalApproximation {
  double normal;   // 1 - 2 Phi(-B / sqrt(n))
  double small_n;  // 2B / sqrt(2 pi n)
};

/// Normal approximation for the symmetric comparison under a fair truth.
NormalApproximation prob_nonextreme_normal(long long n, double alpha,
                                           const CoinComparison& cmp);

struct OverconfidenceRecord {
  long long n;
  double prob_p2_extreme;  // P{P2 > threshold}
  double prob_p1_extreme;  // P{P1 > threshold}
  double prob_nonextreme;  // P{1 - threshold < P1 < threshold}
};

std::vector<OverconfidenceRecord> overconfidence_scan(const CoinComparison& cmp,
                                                      double threshold,
                                                      std::span<const long long> n_values);

struct CoinReplicate {
  std::uint64_t seed;
  long long x;
  double p1;
  std::uint64_t rng_draws;
};

/// Replicate i draws from its own stream derive_seed(seed, tag, i).
std::vector<CoinReplicate> simulate_coin_replicates(const CoinComparison& cmp, long long n,
                                                    int reps, std::uint64_t seed);

}  // namespace paradox::coin
