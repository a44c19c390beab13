#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include "paradox/phylo.hpp"

namespace paradox::phylo {

namespace {

using Objective = std::function<double(const std::vector<double>&)>;

constexpr double kUpper = 10.0;

struct Counter {
  const Objective& f;
  int calls = 0;
  double operator()(const std::vector<double>& x) {
    ++calls;
    const double v = f(x);
    return std::isnan(v) ? kInf : v;
  }
};

void clamp_box(std::vector<double>& x) {
  for (double& v : x) v = std::clamp(v, 0.0, kUpper);
}

// Nelder-Mead with candidates projected into [0, kUpper]^d.
std::vector<double> nelder_mead(Counter& f, std::vector<double> x0, int max_iter) {
  const std::size_t d = x0.size();
  std::vector<std::vector<double>> simplex(d + 1, x0);
  for (std::size_t i = 0; i < d; ++i) simplex[i + 1][i] += 0.1 * std::max(std::abs(x0[i]), 0.1);
  for (auto& p : simplex) clamp_box(p);
  std::vector<double> values(d + 1);
  for (std::size_t i = 0; i <= d; ++i) values[i] = f(simplex[i]);

  std::vector<std::size_t> order(d + 1);
  for (int iter = 0; iter < max_iter; ++iter) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return values[a] < values[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second = order[d - 1];
    if (std::abs(values[worst] - values[best]) < 1e-14 * (1.0 + std::abs(values[best]))) break;

    std::vector<double> centroid(d, 0.0);
    for (std::size_t i = 0; i <= d; ++i) {
      if (i == worst) continue;
      for (std::size_t j = 0; j < d; ++j) centroid[j] += simplex[i][j] / static_cast<double>(d);
    }
    auto along = [&](double coef) {
      std::vector<double> p(d);
      for (std::size_t j = 0; j < d; ++j) p[j] = centroid[j] + coef * (simplex[worst][j] - centroid[j]);
      clamp_box(p);
      return p;
    };

    auto reflected = along(-1.0);
    const double fr = f(reflected);
    if (fr < values[best]) {
      auto expanded = along(-2.0);
      const double fe = f(expanded);
      if (fe < fr) {
        simplex[worst] = std::move(expanded);
        values[worst] = fe;
      } else {
        simplex[worst] = std::move(reflected);
        values[worst] = fr;
      }
    } else if (fr < values[second]) {
      simplex[worst] = std::move(reflected);
      values[worst] = fr;
    } else {
      auto contracted = fr < values[worst] ? along(-0.5) : along(0.5);
      const double fc = f(contracted);
      if (fc < std::min(fr, values[worst])) {
        simplex[worst] = std::move(contracted);
        values[worst] = fc;
      } else {
        for (std::size_t i = 0; i <= d; ++i) {
          if (i == best) continue;
          for (std::size_t j = 0; j < d; ++j) {
            simplex[i][j] = simplex[best][j] + 0.5 * (simplex[i][j] - simplex[best][j]);
          }
          values[i] = f(simplex[i]);
        }
      }
    }
  }
  const auto best = static_cast<std::size_t>(
      std::min_element(values.begin(), values.end()) - values.begin());
  return simplex[best];
}

// Golden-section minimization of coordinate i on [lo, hi].
double golden_section(Counter& f, std::vector<double> x, std::size_t i, double lo, double hi) {
  constexpr double kInvPhi = 0.6180339887498949;
  auto at = [&](double v) {
    x[i] = v;
    return f(x);
  };
  double a = lo;
  double b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = at(c);
  double fd = at(d);
  while (b - a > 1e-12) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = at(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = at(d);
    }
  }
  return 0.5 * (a + b);
}

// Maximizes `objective` over the box; returns the maximizer.
FitResult maximize(const Objective& objective, std::vector<double> start) {
  const Objective negated = [&](const std::vector<double>& x) { return -objective(x); };
  Counter f{negated};
  std::vector<double> x = nelder_mead(f, std::move(start), 4000);
  double current = f(x);

  bool converged = false;
  for (int cycle = 0; cycle < 200 && !converged; ++cycle) {
    const double before = current;
    for (std::size_t i = 0; i < x.size(); ++i) {
      double width = std::max(0.02, 0.5 * x[i]);
      double v = x[i];
      for (int expand = 0; expand < 20; ++expand) {
        const double lo = std::max(0.0, x[i] - width);
        const double hi = std::min(kUpper, x[i] + width);
        v = golden_section(f, x, i, lo, hi);
        const bool hit_upper = hi < kUpper && hi - v < 1e-9;
        const bool hit_lower = lo > 0.0 && v - lo < 1e-9;
        if (!hit_upper && !hit_lower) break;
        width *= 2.0;
      }
      std::vector<double> trial = x;
      trial[i] = v;
      double ft = f(trial);
      // Boundary optima are represented exactly. Near a flat boundary the
      // objective only resolves t to about sqrt(eps), so ties within a few
      // ulps go to the boundary.
      if (v < 1e-6) {
        std::vector<double> at_zero = x;
        at_zero[i] = 0.0;
        const double fz = f(at_zero);
        if (fz <= ft + 8.0 * std::numeric_limits<double>::epsilon() * std::abs(ft)) {
          trial = std::move(at_zero);
          ft = fz;
        }
      }
      if (ft <= current) {
        x = std::move(trial);
        current = ft;
      }
    }
    converged = before - current < 1e-13;
  }
  if (!converged) {
    throw ConvergenceError("best_fit_params: optimizer did not converge", -current);
  }

  const double tie = 8.0 * std::numeric_limits<double>::epsilon() * std::abs(current);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] == 0.0 || x[i] >= 1e-6) continue;
    std::vector<double> at_zero = x;
    at_zero[i] = 0.0;
    const double fz = f(at_zero);
    if (fz <= current + tie) {
      x = std::move(at_zero);
      current = std::min(current, fz);
    }
  }

  FitResult out;
  out.theta = x;
  out.objective = -f(x);
  out.evaluations = f.calls;
  out.at_boundary.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out.at_boundary[i] = x[i] == 0.0;
  return out;
}

template <std::size_t K>
double expected_log_prob(const std::array<double, K>& q, const std::array<double, K>& p) {
  double total = 0.0;
  for (std::size_t j = 0; j < K; ++j) {
    if (q[j] <= 0.0) continue;
    if (!(p[j] > 0.0)) return -kInf;
    total += q[j] * std::log(p[j]);
  }
  return total;
}

}  // namespace

FitResult fit_to_distribution(Topology3 topology, const RateModel& analysis_rates,
                              const PatternProbs3& expected) {
  if (topology == Topology3::Star) throw DomainError("fit_to_distribution: binary topology required");
  const Objective objective = [&](const std::vector<double>& th) {
    return expected_log_prob(expected, pattern_probs_3taxon(topology, {th[0], th[1]}, analysis_rates));
  };
  return maximize(objective, {0.05, 0.15});
}

FitResult fit_to_distribution(Topology4 topology, const RateModel& analysis_rates,
                              const PatternProbs4& expected) {
  if (topology == Topology4::Star) throw DomainError("fit_to_distribution: binary topology required");
  const Objective objective = [&](const std::vector<double>& th) {
    Tree4 tree{topology, {th[0], th[1], th[2], th[3], th[4]}};
    return expected_log_prob(expected, class_probs_4taxon_fast(tree, analysis_rates));
  };
  return maximize(objective, {0.05, 0.15, 0.15, 0.15, 0.15});
}

FitResult best_fit_params(Topology3 topology, const RateModel& generating_rates,
                          const RateModel& analysis_rates, const ClockBranchLengths& generating_bl,
                          Topology3 generating_topology) {
  return fit_to_distribution(topology, analysis_rates,
                             pattern_probs_3taxon(generating_topology, generating_bl, generating_rates));
}

FitResult best_fit_params(Topology4 topology, const RateModel& generating_rates,
                          const RateModel& analysis_rates, const Tree4& generating_tree) {
  return fit_to_distribution(topology, analysis_rates,
                             pattern_probs_4taxon(generating_tree, generating_rates));
}

}  // namespace paradox::phylo
