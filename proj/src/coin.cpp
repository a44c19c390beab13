#include "paradox/coin.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "paradox/numerics.hpp"

namespace paradox::coin {

bool CoinComparison::symmetric() const { return std::abs(p2 - (1.0 - p1)) < 1e-15; }

void validate(const CoinComparison& cmp) {
  auto open_unit = [](double p) { return p > 0.0 && p < 1.0; };
  if (!open_unit(cmp.p_true) || !open_unit(cmp.p1) || !open_unit(cmp.p2)) {
    throw DomainError("CoinComparison: probabilities must lie in (0, 1)");
  }
  if (cmp.p1 == cmp.p2) throw DomainError("CoinComparison: p1 and p2 must differ");
}

namespace {

void validate(const CoinDataset& data) {
  if (data.n < 0 || data.x < 0 || data.x > data.n) {
    throw DomainError("CoinDataset: need 0 <= x <= n");
  }
}

void validate_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 0.5)) throw DomainError("alpha must lie in (0, 1/2)");
}

// Per-head and per-tail log likelihood-ratio increments.
struct LogRatios {
  double head;
  double tail;
};

LogRatios log_ratios(const CoinComparison& cmp) {
  return {std::log(cmp.p1 / cmp.p2), std::log((1.0 - cmp.p1) / (1.0 - cmp.p2))};
}

double log_odds(long long n, long long x, const LogRatios& r, bool symmetric) {
  if (symmetric) return static_cast<double>(2 * x - n) * r.head;
  return static_cast<double>(x) * r.head + static_cast<double>(n - x) * r.tail;
}

// Binomial log pmf written so that x and n - x enter symmetrically.
double log_binomial_pmf(long long n, long long x, double log_p, double log_q) {
  const double dn = static_cast<double>(n);
  const double dx = static_cast<double>(x);
  const double log_choose =
      std::lgamma(dn + 1.0) - (std::lgamma(dx + 1.0) + std::lgamma(dn - dx + 1.0));
  return log_choose + (dx * log_p + (dn - dx) * log_q);
}

std::vector<double> binomial_pmf(long long n, double p) {
  const double log_p = std::log(p);
  const double log_q = std::log1p(-p);
  std::vector<double> pmf(static_cast<std::size_t>(n) + 1);
  for (long long x = 0; x <= n; ++x) pmf[x] = std::exp(log_binomial_pmf(n, x, log_p, log_q));
  // Renormalizing removes the lgamma rounding shared by every term.
  double total = 0.0;
  for (double v : pmf) total += v;
  for (double& v : pmf) v /= total;
  return pmf;
}

}  // namespace

double coin_log_odds(const CoinDataset& data, const CoinComparison& cmp) {
  validate(data);
  validate(cmp);
  return log_odds(data.n, data.x, log_ratios(cmp), cmp.symmetric());
}

double coin_posterior(const CoinDataset& data, const CoinComparison& cmp) {
  return logistic(coin_log_odds(data, cmp));
}

NonextremeThreshold nonextreme_threshold(double alpha, const CoinComparison& cmp) {
  validate_alpha(alpha);
  validate(cmp);
  const LogRatios r = log_ratios(cmp);
  const double a = std::log((1.0 - alpha) / alpha);
  // log odds = x (head - tail) + n tail; solve |log odds| < a for x.
  const double coef = r.head - r.tail;
  LinearBound b1{-a / coef, -r.tail / coef};
  LinearBound b2{a / coef, -r.tail / coef};
  if (coef < 0.0) std::swap(b1, b2);

  NonextremeThreshold out{std::nullopt, b1, b2};
  if (cmp.symmetric()) out.b = std::log(alpha / (1.0 - alpha)) / r.head;
  if (out.b && *out.b < 0.0) out.b = -*out.b;
  return out;
}

double prob_nonextreme_exact(long long n, double alpha, const CoinComparison& cmp) {
  if (n < 1) throw DomainError("prob_nonextreme_exact: n must be >= 1");
  const NonextremeThreshold t = nonextreme_threshold(alpha, cmp);
  const LogRatios r = log_ratios(cmp);
  const bool sym = cmp.symmetric();
  const double a = std::log((1.0 - alpha) / alpha);
  const double log_p = std::log(cmp.p_true);
  const double log_q = std::log1p(-cmp.p_true);

  const auto lo = std::max<long long>(0, static_cast<long long>(std::floor(t.lower.at(n))));
  const auto hi = std::min<long long>(n, static_cast<long long>(std::ceil(t.upper.at(n))));
  double total = 0.0;
  for (long long x = lo; x <= hi; ++x) {
    if (std::abs(log_odds(n, x, r, sym)) < a) {
      total += std::exp(log_binomial_pmf(n, x, log_p, log_q));
    }
  }
  return total;
}

NormalApproximation prob_nonextreme_normal(long long n, double alpha,
                                           const CoinComparison& cmp) {
  if (n < 1) throw DomainError("prob_nonextreme_normal: n must be >= 1");
  const NonextremeThreshold t = nonextreme_threshold(alpha, cmp);
  if (!t.b || cmp.p_true != 0.5) {
    throw DomainError("prob_nonextreme_normal: needs p2 = 1 - p1 and a fair truth");
  }
  const double sd = std::sqrt(static_cast<double>(n));
  return {1.0 - 2.0 * normal_cdf(-*t.b / sd),
          2.0 * *t.b / (std::sqrt(2.0 * std::numbers::pi) * sd)};
}

std::vector<OverconfidenceRecord> overconfidence_scan(const CoinComparison& cmp,
                                                      double threshold,
                                                      std::span<const long long> n_values) {
  validate(cmp);
  if (!(threshold > 0.5 && threshold < 1.0)) {
    throw DomainError("overconfidence_scan: threshold must lie in (1/2, 1)");
  }
  const LogRatios r = log_ratios(cmp);
  const bool sym = cmp.symmetric();
  const double a = std::log(threshold / (1.0 - threshold));

  std::vector<OverconfidenceRecord> out;
  out.reserve(n_values.size());
  for (long long n : n_values) {
    if (n < 1) throw DomainError("overconfidence_scan: n must be >= 1");
    const std::vector<double> pmf = binomial_pmf(n, cmp.p_true);
    // The log odds is linear in x, so each tail is a run at one end. Tails are
    // summed from the extreme end inward; with p2 = 1 - p1 and a fair truth the
    // two tails then add bitwise-identical sequences.
    const bool increasing = log_odds(n, n, r, sym) > log_odds(n, 0, r, sym);
    auto tail = [&](bool from_top, auto in_tail) {
      double sum = 0.0;
      for (long long i = 0; i <= n; ++i) {
        const long long x = from_top ? n - i : i;
        if (!in_tail(log_odds(n, x, r, sym))) break;
        sum += pmf[x];
      }
      return sum;
    };
    const double p1_tail = tail(increasing, [a](double lo) { return lo > a; });
    const double p2_tail = tail(!increasing, [a](double lo) { return lo < -a; });
    double middle = 0.0;
    for (long long x = 0; x <= n; ++x) {
      if (std::abs(log_odds(n, x, r, sym)) < a) middle += pmf[x];
    }
    out.push_back({n, p2_tail, p1_tail, middle});
  }
  return out;
}

std::vector<CoinReplicate> simulate_coin_replicates(const CoinComparison& cmp, long long n,
                                                    int reps, std::uint64_t seed) {
  validate(cmp);
  if (n < 1) throw DomainError("simulate_coin_replicates: n must be >= 1");
  if (reps < 1) throw DomainError("simulate_coin_replicates: reps must be >= 1");
  const std::uint64_t tag = string_tag("coin");
  std::vector<CoinReplicate> out;
  out.reserve(reps);
  for (int i = 0; i < reps; ++i) {
    const std::uint64_t s = derive_seed(seed, tag, static_cast<std::uint64_t>(i));
    CountingEngine rng(s);
    std::binomial_distribution<long long> binom(n, cmp.p_true);
    const long long x = binom(rng);
    out.push_back({s, x, coin_posterior({n, x}, cmp), rng.draws()});
  }
  return out;
}

}  // namespace paradox::coin
