#include "paradox/selection.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace paradox::selection {

std::string_view to_string(BehaviorClass kind) {
  switch (kind) {
    case BehaviorClass::Type1ConvergesToPoint: return "type1-converges-to-point";
    case BehaviorClass::Type2NondegenerateDistribution: return "type2-nondegenerate-distribution";
    case BehaviorClass::Type3RandomWalk: return "type3-random-walk";
    case BehaviorClass::FewerParamsDominates: return "fewer-params-dominates";
    case BehaviorClass::LessWrongDominates: return "less-wrong-dominates";
  }
  return "unknown";
}

void validate(const ComparisonStructure& s) {
  if (s.d1 < 0 || s.d2 < 0) throw DomainError("ComparisonStructure: negative dimension");
  if (s.identical_or_overlapping && s.distinct) {
    throw DomainError("ComparisonStructure: identical models cannot be distinct");
  }
}

double kl_divergence_numeric(const Density& true_density, const Density& model_density,
                             Interval support, double tolerance) {
  auto integrand = [&](double x) {
    const double g = true_density(x);
    if (g <= 0.0) return 0.0;
    const double f = model_density(x);
    if (!(f > 0.0)) {
      throw DomainError("kl_divergence_numeric: model density not positive where g > 0");
    }
    return g * (std::log(g) - std::log(f));
  };
  return integrate(integrand, support, tolerance);
}

BehaviorClass classify_behavior(const ComparisonStructure& s) {
  if (s.identical_or_overlapping) return BehaviorClass::Type1ConvergesToPoint;
  if (s.equally_wrong_gap != 0.0) return BehaviorClass::LessWrongDominates;
  if (!s.distinct) {
    return s.d1 == s.d2 ? BehaviorClass::Type2NondegenerateDistribution
                        : BehaviorClass::FewerParamsDominates;
  }
  return BehaviorClass::Type3RandomWalk;
}

namespace {

void validate(const RandomWalkSpec& spec) {
  if (!(spec.step_variance > 0.0)) throw DomainError("RandomWalkSpec: C must be > 0");
  if (spec.n < 1) throw DomainError("RandomWalkSpec: n must be >= 1");
}

}  // namespace

RandomWalkMoments random_walk_moments(const RandomWalkSpec& spec) {
  validate(spec);
  return {0.0, static_cast<double>(spec.n) * spec.step_variance};
}

NonextremeProbability prob_nonextreme_walk(double alpha, const RandomWalkSpec& spec) {
  validate(spec);
  if (!(alpha > 0.0 && alpha <= 0.5)) {
    throw DomainError("prob_nonextreme_walk: alpha must lie in (0, 1/2]");
  }
  const double a = std::log((1.0 - alpha) / alpha);
  const double sd = std::sqrt(static_cast<double>(spec.n) * spec.step_variance);
  return {1.0 - 2.0 * normal_cdf(-a / sd), 2.0 * a / (std::sqrt(2.0 * std::numbers::pi) * sd)};
}

DecompositionTerms decompose_log_marginal(double log_marginal, double log_like_at_mle,
                                          double log_like_at_pseudotrue,
                                          double log_true_density) {
  return {log_marginal - log_like_at_mle, log_like_at_mle - log_like_at_pseudotrue,
          log_like_at_pseudotrue - log_true_density};
}

InformationMatrices information_matrices(const LogDensityFamily& model,
                                         std::span<const double> theta_star,
                                         const Density& true_density, Interval support,
                                         double tolerance) {
  const auto d = static_cast<int>(theta_star.size());
  if (d == 0) throw DomainError("information_matrices: empty parameter vector");

  // Gradients use h = 1e-5 scale; second differences use h = 1e-4 scale,
  // which keeps their roundoff (eps / h^2) near 1e-8.
  std::vector<double> grad_step(d);
  std::vector<double> hess_step(d);
  for (int i = 0; i < d; ++i) {
    grad_step[i] = std::max(1e-5, 1e-5 * std::abs(theta_star[i]));
    hess_step[i] = std::max(1e-4, 1e-4 * std::abs(theta_star[i]));
  }

  auto shifted = [&](double x, const std::vector<double>& step, int i, double si, int j, double sj) {
    std::vector<double> t(theta_star.begin(), theta_star.end());
    if (i >= 0) t[i] += si * step[i];
    if (j >= 0) t[j] += sj * step[j];
    return model(x, t);
  };
  auto gradient = [&](double x, int i) {
    const auto& h = grad_step;
    return (shifted(x, h, i, 1, -1, 0) - shifted(x, h, i, -1, -1, 0)) / (2.0 * h[i]);
  };
  auto hessian = [&](double x, int i, int j) {
    const auto& h = hess_step;
    if (i == j) {
      return (shifted(x, h, i, 1, -1, 0) - 2.0 * shifted(x, h, -1, 0, -1, 0) +
              shifted(x, h, i, -1, -1, 0)) /
             (h[i] * h[i]);
    }
    return (shifted(x, h, i, 1, j, 1) - shifted(x, h, i, 1, j, -1) - shifted(x, h, i, -1, j, 1) +
            shifted(x, h, i, -1, j, -1)) /
           (4.0 * h[i] * h[j]);
  };

  InformationMatrices out;
  out.i_star = Eigen::MatrixXd::Zero(d, d);
  out.j_star = Eigen::MatrixXd::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) {
      const double iv = integrate(
          [&](double x) {
            const double g = true_density(x);
            return g > 0.0 ? g * gradient(x, i) * gradient(x, j) : 0.0;
          },
          support, tolerance);
      const double jv = integrate(
          [&](double x) {
            const double g = true_density(x);
            return g > 0.0 ? -g * hessian(x, i, j) : 0.0;
          },
          support, tolerance);
      out.i_star(i, j) = out.i_star(j, i) = iv;
      out.j_star(i, j) = out.j_star(j, i) = jv;
    }
  }
  Eigen::LLT<Eigen::MatrixXd> llt(out.j_star);
  out.j_singular = llt.info() != Eigen::Success;
  return out;
}

namespace {

double sample_sd(std::span<const double> v) {
  const double n = static_cast<double>(v.size());
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / (n - 1.0));
}

double ols_slope(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

}  // namespace

GrowthOrder estimate_growth_order(const DeltaSampler& sampler,
                                  std::span<const long long> n_grid, int reps,
                                  std::uint64_t seed, int bootstrap) {
  if (n_grid.size() < 4) throw DomainError("estimate_growth_order: need >= 4 grid points");
  if (!std::is_sorted(n_grid.begin(), n_grid.end()) || n_grid.front() < 1 ||
      std::adjacent_find(n_grid.begin(), n_grid.end()) != n_grid.end()) {
    throw DomainError("estimate_growth_order: n_grid must be strictly increasing and positive");
  }
  if (static_cast<double>(n_grid.back()) < 100.0 * static_cast<double>(n_grid.front())) {
    throw DomainError("estimate_growth_order: n_grid must span at least two decades");
  }
  if (reps < 2) throw DomainError("estimate_growth_order: reps must be >= 2");

  const std::size_t k = n_grid.size();
  std::vector<std::vector<double>> draws(k, std::vector<double>(reps));
  std::vector<double> log_n(k);
  std::vector<double> log_sd(k);
  for (std::size_t g = 0; g < k; ++g) {
    for (int r = 0; r < reps; ++r) {
      CountingEngine rng(derive_seed(seed, g, static_cast<std::uint64_t>(r)));
      draws[g][r] = sampler(n_grid[g], rng);
    }
    const double sd = sample_sd(draws[g]);
    if (!(sd > 0.0)) {
      throw DomainError("estimate_growth_order: zero sample variance at some n");
    }
    log_n[g] = std::log(static_cast<double>(n_grid[g]));
    log_sd[g] = std::log(sd);
  }

  GrowthOrder out{ols_slope(log_n, log_sd), 0.0, 0.0};

  CountingEngine rng(derive_seed(seed, string_tag("bootstrap"), 0));
  std::uniform_int_distribution<int> pick(0, reps - 1);
  std::vector<double> slopes;
  slopes.reserve(bootstrap);
  std::vector<double> resample(reps);
  std::vector<double> boot_sd(k);
  for (int b = 0; b < bootstrap; ++b) {
    bool degenerate = false;
    for (std::size_t g = 0; g < k; ++g) {
      for (int r = 0; r < reps; ++r) resample[r] = draws[g][pick(rng)];
      const double sd = sample_sd(resample);
      if (!(sd > 0.0)) {
        degenerate = true;
        break;
      }
      boot_sd[g] = std::log(sd);
    }
    if (!degenerate) slopes.push_back(ols_slope(log_n, boot_sd));
  }
  if (slopes.empty()) {
    out.ci_lo = out.ci_hi = out.slope;
    return out;
  }
  std::sort(slopes.begin(), slopes.end());
  auto quantile = [&](double q) {
    const double pos = q * static_cast<double>(slopes.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, slopes.size() - 1);
    return slopes[lo] + (pos - static_cast<double>(lo)) * (slopes[hi] - slopes[lo]);
  };
  out.ci_lo = quantile(0.025);
  out.ci_hi = quantile(0.975);
  return out;
}

}  // namespace paradox::selection
