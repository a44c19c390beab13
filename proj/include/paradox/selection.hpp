#pragma once

// Two-model Bayesian comparison theory: K-L divergence, the random walk of
// the log marginal-likelihood ratio, the three-term decomposition of
// log(M_k / g(x)), information matrices and the asymptotic behavior classes.

#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "paradox/numerics.hpp"

namespace paradox::selection {

using Density = std::function<double(double)>;

/// log f(x | theta) for a parametric family on the real line.
using LogDensityFamily = std::function<double(double x, std::span<const double> theta)>;

enum class BehaviorClass {
  Type1ConvergesToPoint,
  Type2NondegenerateDistribution,
  Type3RandomWalk,
  FewerParamsDominates,
  LessWrongDominates,
};

std::string_view to_string(BehaviorClass kind);

struct ComparisonStructure {
  bool distinct = false;
  int d1 = 0;
  int d2 = 0;
  double equally_wrong_gap = 0.0;  // D1 - D2 in nats
  bool identical_or_overlapping = false;
};

/// Throws DomainError when the structure violates its invariants.
void validate(const ComparisonStructure& s);

struct RandomWalkSpec {
  double step_variance = 1.0;  // C, nats^2
  long long n = 1;
};

struct RandomWalkMoments {
  double mean;
  double variance;
};

struct NonextremeProbability {
  double normal;    // 1 - 2 Phi(-A / sqrt(nC))
  double small_n;   // 2A / sqrt(2 pi n C)
};

struct DecompositionTerms {
  double a;  // log M - log L(theta_hat)
  double b;  // log L(theta_hat) - log L(theta*)
  double c;  // log L(theta*) - log g(x)
  double total() const { return a + b + c; }
};

struct InformationMatrices {
  Eigen::MatrixXd i_star;
  Eigen::MatrixXd j_star;
  bool j_singular = false;  // J* not positive definite (boundary or flat optimum)
};

struct GrowthOrder {
  double slope;
  double ci_lo;
  double ci_hi;
};

/// Draws one Delta_n for data size n.
using DeltaSampler = std::function<double(long long n, CountingEngine& rng)>;

/// D = E_g[log g / f] by adaptive quadrature over `support`.
double kl_divergence_numeric(const Density& true_density, const Density& model_density,
                             Interval support, double tolerance);

BehaviorClass classify_behavior(const ComparisonStructure& s);

RandomWalkMoments random_walk_moments(const RandomWalkSpec& spec);

/// Probability that |Delta_n| < log((1 - alpha) / alpha).
NonextremeProbability prob_nonextreme_walk(double alpha, const RandomWalkSpec& spec);

DecompositionTerms decompose_log_marginal(double log_marginal, double log_like_at_mle,
                                          double log_like_at_pseudotrue,
                                          double log_true_density);

/// I* = E_g[grad grad^T] and J* = E_g[-hess] of log f at theta_star, with
/// central finite differences and quadrature under g on `support`.
InformationMatrices information_matrices(const LogDensityFamily& model,
                                         std::span<const double> theta_star,
                                         const Density& true_density, Interval support,
                                         double tolerance);

/// Log-log slope of the sample standard deviation of Delta_n against n, with a
/// percentile bootstrap interval (resampling replicates within each n).
GrowthOrder estimate_growth_order(const DeltaSampler& sampler,
                                  std::span<const long long> n_grid, int reps,
                                  std::uint64_t seed, int bootstrap = 400);

}  // namespace paradox::selection
