#pragma once

// Fair-balance paradoxes. Truth is N(0, 1).
//  - Sign model: H1: N(mu, 1/tau), mu < 0 against H2: mu > 0, mu ~ N(0, 1/xi).
//  - Variance pair: H1: N(mu, 1/tau1) against H2: N(mu, 1/tau2), mu ~ N(0, 1/xi).

#include <cstdint>
#include <vector>

namespace paradox::balance {

struct SignModelConfig {
  double tau = 1.0;
  double xi = 1.0;
  long long n = 1;
};

struct VariancePairConfig {
  double tau1 = 0.25;
  double tau2 = 2.58666;
  double xi = 1.0;
  long long n = 1;
};

/// Sufficient statistics; s2 uses divisor n.
struct GaussianSummary {
  long long n = 1;
  double xbar = 0.0;
  double s2 = 0.0;
};

void validate(const SignModelConfig& cfg);
void validate(const VariancePairConfig& cfg);
void validate(const GaussianSummary& s);

double posterior_sign_model(const GaussianSummary& summary, const SignModelConfig& cfg);

/// Sampling density of P1 across datasets.
double density_p1_sign(double p1, const SignModelConfig& cfg);

/// Sampling CDF of P1 implied by density_p1_sign (x-bar ~ N(0, 1/n)).
double cdf_p1_sign(double p1, const SignModelConfig& cfg);

/// log of the marginal likelihood of N(mu, 1/tau) data with mu ~ N(0, 1/xi).
double log_marginal_variance_model(const GaussianSummary& summary, double tau, double xi);

/// log(P1 / P2) from the closed-form posterior odds.
double log_posterior_odds_variance(const GaussianSummary& summary,
                                   const VariancePairConfig& cfg);

/// Large-n form (tau2 - tau1)(n s2 - (n - 1)) / 2.
double limit_log_odds(const GaussianSummary& summary, const VariancePairConfig& cfg);

/// tau2 > 1 with tau2 - log tau2 = tau1 - log tau1, for tau1 in (0, 1).
double equally_wrong_partner(double tau1);

/// Truth precision tau0 that makes N(mu, 1/tau1) and N(mu, 1/tau2) equally wrong.
double equally_wrong_truth_precision(double tau1, double tau2);

/// K-L divergence of N(0, 1/tau) from the N(0, 1) truth.
double kl_gaussian_precision(double tau);

struct BalanceReplicate {
  std::uint64_t seed;
  double xbar;
  double s2;  // 0 for the sign model (not drawn)
  double p1;
  std::uint64_t rng_draws;
};

std::vector<BalanceReplicate> simulate_balance_replicates(const SignModelConfig& cfg,
                                                          int reps, std::uint64_t seed);
std::vector<BalanceReplicate> simulate_balance_replicates(const VariancePairConfig& cfg,
                                                          int reps, std::uint64_t seed);

}  // namespace paradox::balance
