#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>
#include <gtest/gtest.h>

#include "paradox/balance.hpp"
#include "paradox/numerics.hpp"
#include "paradox/selection.hpp"

using namespace paradox;
using namespace paradox::balance;

namespace {

// Brute-force log marginal likelihood: integrate the N(mu, 1/tau) likelihood
// of (n, xbar, s2) against the N(0, 1/xi) prior over mu, optionally restricted
// to one half-line with the prior renormalized to that half.
double oracle_log_marginal(const GaussianSummary& s, double tau, double xi, int half = 0) {
  const double n = static_cast<double>(s.n);
  const double sd = 1.0 / std::sqrt(xi);
  auto log_like = [&](double mu) {
    return 0.5 * n * std::log(tau / (2.0 * std::numbers::pi)) -
           0.5 * tau * n * (s.s2 + (s.xbar - mu) * (s.xbar - mu));
  };
  const double shift = log_like(s.xbar);
  auto integrand = [&](double mu) {
    const double prior = std::sqrt(xi / (2.0 * std::numbers::pi)) * std::exp(-0.5 * xi * mu * mu);
    return prior * std::exp(log_like(mu) - shift);
  };
  const double lo = half > 0 ? 0.0 : -12.0 * sd;
  const double hi = half < 0 ? 0.0 : 12.0 * sd;
  // Split at the likelihood peak so the adaptive rule sees it.
  double total = 0.0;
  const double peak = std::clamp(s.xbar, lo, hi);
  if (peak > lo) total += integrate(integrand, {lo, peak}, 1e-12);
  if (peak < hi) total += integrate(integrand, {peak, hi}, 1e-12);
  const double half_mass = half == 0 ? 1.0 : 0.5;
  return std::log(total / half_mass) + shift;
}

double independent_log_marginal(const GaussianSummary& s, double tau, double xi) {
  const double n = static_cast<double>(s.n);
  return 0.5 * n * std::log(tau / (2.0 * std::numbers::pi)) + 0.5 * std::log(xi / (xi + n * tau)) -
         0.5 * tau * n * s.s2 - 0.5 * n * tau * xi * s.xbar * s.xbar / (xi + n * tau);
}

}  // namespace

TEST(SignModelTest, PosteriorMatchesQuadratureOracle) {
  for (const auto& [n, xbar] : std::vector<std::pair<long long, double>>{{1, 0.3}, {10, -0.2}, {50, 0.05}}) {
    const SignModelConfig cfg{1.5, 0.7, n};
    const GaussianSummary s{n, xbar, 0.9};
    const double m1 = oracle_log_marginal(s, cfg.tau, cfg.xi, -1);
    const double m2 = oracle_log_marginal(s, cfg.tau, cfg.xi, +1);
    EXPECT_NEAR(posterior_sign_model(s, cfg), 1.0 / (1.0 + std::exp(m2 - m1)), 1e-9) << n;
  }
  EXPECT_DOUBLE_EQ(posterior_sign_model({100, 0.0, 1.0}, {1.0, 1.0, 100}), 0.5);
}

TEST(SignModelTest, DensityIntegratesToOne) {
  for (const SignModelConfig& cfg : {SignModelConfig{1.0, 1.0, 1000}, SignModelConfig{0.5, 2.0, 10},
                                     SignModelConfig{2.0, 1.0, 3}}) {
    // p = Phi(z) maps the open interval onto the real line.
    const double mass = integrate(
        [&](double z) { return density_p1_sign(normal_cdf(z), cfg) * normal_pdf(z); }, {-8.0, 8.0},
        1e-10);
    EXPECT_NEAR(mass, 1.0, 1e-6) << cfg.tau << " " << cfg.xi << " " << cfg.n;
  }
}

TEST(SignModelTest, CdfIsIntegralOfDensity) {
  const SignModelConfig cfg{1.0, 1.0, 1000};
  for (double p : {0.05, 0.3, 0.5, 0.9}) {
    const double z = normal_quantile(p);
    const double from_density = integrate(
        [&](double u) { return density_p1_sign(normal_cdf(u), cfg) * normal_pdf(u); }, {-8.0, z}, 1e-11);
    EXPECT_NEAR(cdf_p1_sign(p, cfg), from_density, 1e-8);
  }
}

TEST(SignModelTest, SimulationFollowsDensityLaw) {
  const SignModelConfig cfg{1.0, 1.0, 1000};
  auto reps = simulate_balance_replicates(cfg, 10000, 2024);
  std::vector<double> p1;
  for (const auto& r : reps) p1.push_back(r.p1);
  std::sort(p1.begin(), p1.end());
  double d = 0.0;
  const double m = static_cast<double>(p1.size());
  for (std::size_t i = 0; i < p1.size(); ++i) {
    const double f = cdf_p1_sign(p1[i], cfg);
    d = std::max({d, (i + 1) / m - f, f - i / m});
  }
  EXPECT_LT(d, 0.02);
}

TEST(VarianceModelTest, LogMarginalMatchesOracles) {
  for (const GaussianSummary& s : {GaussianSummary{1, 0.4, 0.0}, GaussianSummary{5, -0.3, 1.2},
                                   GaussianSummary{100, 0.05, 0.97}}) {
    for (double tau : {0.3, 1.0, 2.58666}) {
      const double closed = log_marginal_variance_model(s, tau, 1.0);
      EXPECT_NEAR(closed, independent_log_marginal(s, tau, 1.0), 1e-10);
      EXPECT_NEAR(closed, oracle_log_marginal(s, tau, 1.0), 1e-8);
    }
  }
}

TEST(VarianceModelTest, OddsEqualDifferenceOfLogMarginals) {
  for (long long n : {2LL, 100LL, 10000LL}) {
    const VariancePairConfig cfg{0.3, 2.58666, 1.0, n};
    for (double s2 : {0.5, 1.0, 1.7}) {
      const GaussianSummary s{n, 0.11, s2};
      const double diff = log_marginal_variance_model(s, cfg.tau1, cfg.xi) -
                          log_marginal_variance_model(s, cfg.tau2, cfg.xi);
      EXPECT_NEAR(log_posterior_odds_variance(s, cfg), diff, 1e-10);
    }
  }
}

TEST(VarianceModelTest, LimitFormTracksExactOdds) {
  const VariancePairConfig cfg{0.25, equally_wrong_partner(0.25), 1.0, 10000};
  const auto reps = simulate_balance_replicates(cfg, 1000, 8);
  int agree = 0;
  std::vector<double> rel;
  for (const auto& r : reps) {
    const GaussianSummary s{cfg.n, r.xbar, r.s2};
    const double exact = log_posterior_odds_variance(s, cfg);
    const double approx = limit_log_odds(s, cfg);
    agree += (exact > 0) == (approx > 0);
    rel.push_back(std::abs(approx - exact) / std::abs(exact));
  }
  std::nth_element(rel.begin(), rel.begin() + rel.size() / 2, rel.end());
  EXPECT_GE(agree, 990);
  EXPECT_LT(rel[rel.size() / 2], 0.05);
}

TEST(EqualWrongnessTest, PartnerOfQuarter) {
  const double tau2 = equally_wrong_partner(0.25);
  EXPECT_NEAR(tau2, 2.58666, 1e-4);
  EXPECT_NEAR(kl_gaussian_precision(0.25), kl_gaussian_precision(tau2), 1e-12);
  auto normal = [](double tau) {
    return [tau](double x) { return std::sqrt(tau / (2 * std::numbers::pi)) * std::exp(-0.5 * tau * x * x); };
  };
  const double d1 = selection::kl_divergence_numeric(normal(1.0), normal(0.25), {-14.0, 14.0}, 1e-11);
  const double d2 = selection::kl_divergence_numeric(normal(1.0), normal(tau2), {-14.0, 14.0}, 1e-11);
  EXPECT_LT(std::abs(d1 - d2), 1e-6);
  EXPECT_NEAR(d1, kl_gaussian_precision(0.25), 1e-9);
  EXPECT_THROW(equally_wrong_partner(1.0), DomainError);
  EXPECT_THROW(equally_wrong_partner(0.0), DomainError);
}

TEST(EqualWrongnessTest, TruthPrecisionBalancesDivergences) {
  for (const auto& [t1, t2] : std::vector<std::pair<double, double>>{{0.3, 2.58666}, {0.5, 4.0}}) {
    const double t0 = equally_wrong_truth_precision(t1, t2);
    auto kl = [t0](double tau) { return 0.5 * (tau / t0 - 1.0 - std::log(tau / t0)); };
    EXPECT_NEAR(kl(t1), kl(t2), 1e-12);
  }
  EXPECT_NEAR(equally_wrong_truth_precision(0.25, equally_wrong_partner(0.25)), 1.0, 1e-10);
  EXPECT_THROW(equally_wrong_truth_precision(1.0, 1.0), DomainError);
}

TEST(VarianceModelTest, SimulationMatchesChiSquareOracle) {
  // P{P2 > 0.99} by quadrature over xbar ~ N(0, 1/n) and n s2 ~ chi2(n - 1):
  // the log odds is affine in n s2 for fixed xbar.
  const double tau1 = 0.3, tau2 = 2.58666, xi = 1.0;
  const long long n = 100;
  const double nn = static_cast<double>(n);
  boost::math::chi_squared chi(nn - 1.0);
  auto log_odds = [&](double xbar, double ns2) {
    const GaussianSummary s{n, xbar, ns2 / nn};
    return independent_log_marginal(s, tau1, xi) - independent_log_marginal(s, tau2, xi);
  };
  const double cut = -std::log(99.0);
  const double oracle = integrate(
      [&](double z) {
        const double xbar = z / std::sqrt(nn);
        const double c0 = log_odds(xbar, 0.0);
        const double slope = log_odds(xbar, 1.0) - c0;  // (tau2 - tau1) / 2 > 0
        const double limit = (cut - c0) / slope;
        return limit > 0.0 ? normal_pdf(z) * boost::math::cdf(chi, limit) : 0.0;
      },
      {-9.0, 9.0}, 1e-10);

  const int reps = 100000;
  const auto sims = simulate_balance_replicates(VariancePairConfig{tau1, tau2, xi, n}, reps, 31);
  const auto hits = std::count_if(sims.begin(), sims.end(), [](const auto& r) { return 1.0 - r.p1 > 0.99; });
  const double p = static_cast<double>(hits) / reps;
  const double se = std::sqrt(oracle * (1.0 - oracle) / reps);
  EXPECT_NEAR(p, oracle, 4.0 * se);
  EXPECT_NEAR(oracle, 0.2504, 0.002);
}

TEST(BalanceSimulationTest, DeterministicWithCountedDraws) {
  const VariancePairConfig cfg{0.3, 2.58666, 1.0, 100};
  const auto a = simulate_balance_replicates(cfg, 50, 3);
  const auto b = simulate_balance_replicates(cfg, 50, 3);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].xbar, b[i].xbar);
    EXPECT_EQ(a[i].s2, b[i].s2);
    EXPECT_GT(a[i].rng_draws, 0u);
    const double lo = log_posterior_odds_variance({100, a[i].xbar, a[i].s2}, cfg);
    EXPECT_NEAR(a[i].p1, 1.0 / (1.0 + std::exp(-lo)), 1e-14);
  }
  EXPECT_THROW(simulate_balance_replicates(VariancePairConfig{0.3, 2.5, 1.0, 1}, 5, 1), DomainError);
  EXPECT_THROW(simulate_balance_replicates(SignModelConfig{1.0, 1.0, 10}, 0, 1), DomainError);
}

TEST(BalanceValidationTest, RejectsBadInputs) {
  EXPECT_THROW(validate(SignModelConfig{0.0, 1.0, 10}), DomainError);
  EXPECT_THROW(validate(VariancePairConfig{0.3, -1.0, 1.0, 10}), DomainError);
  EXPECT_THROW(validate(GaussianSummary{10, 0.0, -1.0}), DomainError);
  EXPECT_THROW(density_p1_sign(1.0, SignModelConfig{}), DomainError);
}
