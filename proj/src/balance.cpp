#include "paradox/balance.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "paradox/numerics.hpp"

namespace paradox::balance {

void validate(const SignModelConfig& cfg) {
  if (!(cfg.tau > 0.0) || !(cfg.xi > 0.0)) throw DomainError("SignModelConfig: tau, xi > 0");
  if (cfg.n < 1) throw DomainError("SignModelConfig: n >= 1");
}

void validate(const VariancePairConfig& cfg) {
  if (!(cfg.tau1 > 0.0) || !(cfg.tau2 > 0.0) || !(cfg.xi > 0.0)) {
    throw DomainError("VariancePairConfig: tau1, tau2, xi > 0");
  }
  if (cfg.n < 1) throw DomainError("VariancePairConfig: n >= 1");
}

void validate(const GaussianSummary& s) {
  if (s.n < 1) throw DomainError("GaussianSummary: n >= 1");
  if (!(s.s2 >= 0.0)) throw DomainError("GaussianSummary: s2 >= 0");
}

double posterior_sign_model(const GaussianSummary& summary, const SignModelConfig& cfg) {
  validate(summary);
  validate(cfg);
  const double nt = static_cast<double>(summary.n) * cfg.tau;
  return normal_cdf(-nt * summary.xbar / std::sqrt(nt + cfg.xi));
}

double density_p1_sign(double p1, const SignModelConfig& cfg) {
  validate(cfg);
  if (!(p1 > 0.0 && p1 < 1.0)) throw DomainError("density_p1_sign: p1 must lie in (0, 1)");
  const double n = static_cast<double>(cfg.n);
  const double z = normal_quantile(p1);
  const double shape = 1.0 - 1.0 / cfg.tau - cfg.xi / (n * cfg.tau * cfg.tau);
  return std::sqrt(cfg.tau + cfg.xi / n) / cfg.tau * std::exp(0.5 * z * z * shape);
}

double cdf_p1_sign(double p1, const SignModelConfig& cfg) {
  validate(cfg);
  if (p1 <= 0.0) return 0.0;
  if (p1 >= 1.0) return 1.0;
  // P1 = Phi(k z) with z = -sqrt(n) xbar ~ N(0, 1) and k = sqrt(n) tau / sqrt(n tau + xi).
  const double n = static_cast<double>(cfg.n);
  const double k = std::sqrt(n) * cfg.tau / std::sqrt(n * cfg.tau + cfg.xi);
  return normal_cdf(normal_quantile(p1) / k);
}

double log_marginal_variance_model(const GaussianSummary& summary, double tau, double xi) {
  validate(summary);
  if (!(tau > 0.0) || !(xi > 0.0)) throw DomainError("log_marginal_variance_model: tau, xi > 0");
  const double n = static_cast<double>(summary.n);
  const double nt = n * tau;
  const double quad = xi * summary.xbar * summary.xbar + xi * summary.s2 + nt * summary.s2;
  return 0.5 * std::log(xi / (xi + nt)) + 0.5 * n * std::log(tau / (2.0 * std::numbers::pi)) -
         nt * quad / (2.0 * (xi + nt));
}

double log_posterior_odds_variance(const GaussianSummary& summary,
                                   const VariancePairConfig& cfg) {
  validate(summary);
  validate(cfg);
  const double n = static_cast<double>(summary.n);
  const double t1 = cfg.tau1;
  const double t2 = cfg.tau2;
  const double xi = cfg.xi;
  const double x2 = summary.xbar * summary.xbar;
  const double s2 = summary.s2;
  const double d1 = xi + n * t1;
  const double d2 = xi + n * t2;
  const double bracket = (t2 - t1) * (xi * xi * x2 + xi * xi * s2 + n * n * t1 * t2 * s2) +
                         (t2 * t2 - t1 * t1) * n * xi * s2;
  return 0.5 * std::log(d2 / d1) + 0.5 * n * std::log(t1 / t2) +
         n / (2.0 * d1 * d2) * bracket;
}

double limit_log_odds(const GaussianSummary& summary, const VariancePairConfig& cfg) {
  validate(summary);
  validate(cfg);
  const double n = static_cast<double>(summary.n);
  return 0.5 * (cfg.tau2 - cfg.tau1) * (n * summary.s2 - (n - 1.0));
}

double equally_wrong_partner(double tau1) {
  if (!(tau1 > 0.0 && tau1 < 1.0)) {
    throw DomainError("equally_wrong_partner: tau1 must lie in (0, 1)");
  }
  // h(tau) = tau - log tau is increasing on (1, inf) with h(1) = 1 < h(tau1).
  const double target = tau1 - std::log(tau1);
  double lo = 1.0;
  double hi = 1e3;
  while (hi - lo > 1e-12 * hi) {
    const double mid = 0.5 * (lo + hi);
    if (mid - std::log(mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double equally_wrong_truth_precision(double tau1, double tau2) {
  if (!(tau1 > 0.0) || !(tau2 > 0.0) || tau1 == tau2) {
    throw DomainError("equally_wrong_truth_precision: need distinct positive precisions");
  }
  return (tau1 - tau2) / std::log(tau1 / tau2);
}

double kl_gaussian_precision(double tau) {
  if (!(tau > 0.0)) throw DomainError("kl_gaussian_precision: tau > 0");
  return 0.5 * (tau - 1.0 - std::log(tau));
}

std::vector<BalanceReplicate> simulate_balance_replicates(const SignModelConfig& cfg,
                                                          int reps, std::uint64_t seed) {
  validate(cfg);
  if (reps < 1) throw DomainError("simulate_balance_replicates: reps >= 1");
  const std::uint64_t tag = string_tag("balance-sign");
  const double sd = 1.0 / std::sqrt(static_cast<double>(cfg.n));
  std::vector<BalanceReplicate> out;
  out.reserve(reps);
  for (int i = 0; i < reps; ++i) {
    const std::uint64_t s = derive_seed(seed, tag, static_cast<std::uint64_t>(i));
    CountingEngine rng(s);
    std::normal_distribution<double> mean_dist(0.0, sd);
    const double xbar = mean_dist(rng);
    const double p1 = posterior_sign_model({cfg.n, xbar, 0.0}, cfg);
    out.push_back({s, xbar, 0.0, p1, rng.draws()});
  }
  return out;
}

std::vector<BalanceReplicate> simulate_balance_replicates(const VariancePairConfig& cfg,
                                                          int reps, std::uint64_t seed) {
  validate(cfg);
  if (cfg.n < 2) throw DomainError("simulate_balance_replicates: variance pair needs n >= 2");
  if (reps < 1) throw DomainError("simulate_balance_replicates: reps >= 1");
  const std::uint64_t tag = string_tag("balance-var");
  const double n = static_cast<double>(cfg.n);
  std::vector<BalanceReplicate> out;
  out.reserve(reps);
  for (int i = 0; i < reps; ++i) {
    const std::uint64_t s = derive_seed(seed, tag, static_cast<std::uint64_t>(i));
    CountingEngine rng(s);
    std::normal_distribution<double> mean_dist(0.0, 1.0 / std::sqrt(n));
    std::chi_squared_distribution<double> ss_dist(n - 1.0);
    const double xbar = mean_dist(rng);
    const double s2 = ss_dist(rng) / n;
    const double p1 = logistic(log_posterior_odds_variance({cfg.n, xbar, s2}, cfg));
    out.push_back({s, xbar, s2, p1, rng.draws()});
  }
  return out;
}

}  // namespace paradox::balance
