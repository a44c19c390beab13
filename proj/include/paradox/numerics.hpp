#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace paradox {

/// Raised when an argument lies outside the domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised when an iterative or adaptive procedure fails to reach its
/// tolerance. Carries the last estimate so callers can still inspect it.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double last_estimate)
      : std::runtime_error(what), last_estimate_(last_estimate) {}
  double last_estimate() const noexcept { return last_estimate_; }

 private:
  double last_estimate_;
};

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Normal distribution primitives
// ---------------------------------------------------------------------------

double normal_cdf(double x);
double normal_pdf(double x);
/// Inverse of normal_cdf on (0, 1). Throws DomainError at or outside the ends.
double normal_quantile(double p);

/// log(sum(exp(v))) with a max-shift. Returns -inf for an empty or all -inf input.
double log_sum_exp(std::span<const double> values);

/// Logistic map 1 / (1 + exp(-x)) without overflow.
double logistic(double x);

// ---------------------------------------------------------------------------
// Quadrature
// ---------------------------------------------------------------------------

struct Interval {
  double lo;
  double hi;
};

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Legendre rule on (0, 1); weights sum to 1.
QuadratureRule gauss_legendre_unit(int points);

/// Rule for E[h(r)] with r ~ Gamma(shape, rate = shape), i.e. mean 1.
/// Generalized Gauss-Laguerre nodes via Golub-Welsch; weights sum to 1.
QuadratureRule gamma_rate_rule(double shape, int points);

/// Adaptive Gauss-Kronrod integration on a finite interval. `tolerance` is
/// an absolute error bound; failure throws ConvergenceError.
double integrate(const std::function<double(double)>& f, Interval support,
                 double tolerance);

// ---------------------------------------------------------------------------
// Random numbers
// ---------------------------------------------------------------------------

/// SplitMix64 finalizer; used for counter-based seed derivation.
std::uint64_t mix64(std::uint64_t x);

/// Seed for replicate `index` of stream `tag` under `master`. Independent of
/// evaluation order, so parallel runs draw the same numbers as serial ones.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t tag,
                          std::uint64_t index);

/// Stable 64-bit tag for a string (FNV-1a).
std::uint64_t string_tag(std::string_view s);

/// mt19937_64 that counts the raw 64-bit draws it hands out.
class CountingEngine {
 public:
  using result_type = std::mt19937_64::result_type;

  explicit CountingEngine(std::uint64_t seed) : engine_(seed) {}

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }

  result_type operator()() {
    ++draws_;
    return engine_();
  }

  std::uint64_t draws() const noexcept { return draws_; }

 private:
  std::mt19937_64 engine_;
  std::uint64_t draws_ = 0;
};

}  // namespace paradox
