#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "paradox/phylo.hpp"

namespace paradox::phylo {

RateModel RateModel::jc() { return RateModel(kInf, {1.0}, {1.0}); }

RateModel RateModel::gamma(double alpha, int points) {
  if (alpha == kInf) return jc();
  QuadratureRule rule = gamma_rate_rule(alpha, points);
  return RateModel(alpha, std::move(rule.nodes), std::move(rule.weights));
}

long long SitePatternCounts::total() const {
  return std::accumulate(counts.begin(), counts.end(), 0LL);
}

void validate(const SitePatternCounts& c) {
  const std::size_t expected = c.taxa == 3 ? kClasses3 : c.taxa == 4 ? kClasses4 : 0;
  if (expected == 0 || c.counts.size() != expected) {
    throw DomainError("SitePatternCounts: need 5 classes for 3 taxa or 15 for 4 taxa");
  }
  if (std::any_of(c.counts.begin(), c.counts.end(), [](long long v) { return v < 0; })) {
    throw DomainError("SitePatternCounts: negative count");
  }
}

JcTransition jc_transition(double t, double rate) {
  if (!(t >= 0.0)) throw DomainError("jc_transition: t must be >= 0");
  if (!(rate >= 0.0)) throw DomainError("jc_transition: rate must be >= 0");
  const double e = std::exp(-4.0 * rate * t / 3.0);
  return {0.25 + 0.75 * e, 0.25 - 0.25 * e};
}

namespace {

double prob(const JcTransition& tr, int from, int to) {
  return from == to ? tr.p_same : tr.p_diff;
}

// ---- three taxa -----------------------------------------------------------

// Nucleotide triple for each class, in (a, b, c) order.
constexpr std::array<std::array<int, 3>, kClasses3> kRepresentatives3{{
    {0, 0, 0},  // xxx
    {0, 0, 1},  // xxy: a = b
    {1, 0, 0},  // yxx: b = c
    {0, 1, 0},  // xyx: a = c
    {0, 1, 2},  // xyz
}};

// Taxon indices (cherry, cherry, outgroup) of each binary clock tree.
constexpr std::array<std::array<int, 3>, 3> kRoles3{{{0, 1, 2}, {1, 2, 0}, {2, 0, 1}}};

// P(tip states) on the clock tree with the given roles; root state uniform.
double site_prob_3(const std::array<int, 3>& tips, const std::array<int, 3>& roles,
                   const JcTransition& internal, const JcTransition& cherry,
                   const JcTransition& outgroup) {
  const int c1 = tips[roles[0]];
  const int c2 = tips[roles[1]];
  const int out = tips[roles[2]];
  std::array<double, 4> below{};
  double below_sum = 0.0;
  for (int y = 0; y < 4; ++y) {
    below[y] = prob(cherry, y, c1) * prob(cherry, y, c2);
    below_sum += below[y];
  }
  double total = 0.0;
  for (int r = 0; r < 4; ++r) {
    const double inner = internal.p_diff * below_sum + (internal.p_same - internal.p_diff) * below[r];
    total += prob(outgroup, r, out) * inner;
  }
  return 0.25 * total;
}

// ---- four taxa ------------------------------------------------------------

struct ClassTables4 {
  std::array<int, 256> class_of{};
  std::array<std::array<int, 4>, kClasses4> representative{};
  std::array<int, kClasses4> multiplicity{};
  std::array<std::string, kClasses4> label{};
};

std::string canonical_label(const std::array<int, 4>& t) {
  std::array<int, 4> seen{-1, -1, -1, -1};
  std::string label;
  int next = 0;
  for (int v : t) {
    if (seen[v] < 0) seen[v] = next++;
    label.push_back(static_cast<char>('a' + seen[v]));
  }
  return label;
}

const ClassTables4& tables4() {
  static const ClassTables4 tables = [] {
    ClassTables4 tb;
    std::vector<std::string> labels;
    for (int i = 0; i < 256; ++i) {
      labels.push_back(canonical_label({i >> 6, (i >> 4) & 3, (i >> 2) & 3, i & 3}));
    }
    std::vector<std::string> distinct = labels;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    for (int i = 0; i < 256; ++i) {
      const auto k = static_cast<int>(
          std::lower_bound(distinct.begin(), distinct.end(), labels[i]) - distinct.begin());
      tb.class_of[i] = k;
      if (tb.multiplicity[k]++ == 0) {
        tb.representative[k] = {i >> 6, (i >> 4) & 3, (i >> 2) & 3, i & 3};
        tb.label[k] = labels[i];
      }
    }
    return tb;
  }();
  return tables;
}

// Taxon indices (x, partner of x, other, other) of each unrooted binary tree.
constexpr std::array<std::array<int, 4>, 3> kSplits4{{{0, 1, 2, 3}, {0, 2, 1, 3}, {0, 3, 1, 2}}};

int split_index(Topology4 t) { return t == Topology4::Star ? 0 : static_cast<int>(t); }

double site_prob_4(const std::array<int, 4>& tips, const std::array<int, 4>& split,
                   const JcTransition& internal, const std::array<JcTransition, 4>& pendant) {
  std::array<double, 4> left{};
  std::array<double, 4> right{};
  double right_sum = 0.0;
  for (int s = 0; s < 4; ++s) {
    left[s] = prob(pendant[split[0]], s, tips[split[0]]) * prob(pendant[split[1]], s, tips[split[1]]);
    right[s] = prob(pendant[split[2]], s, tips[split[2]]) * prob(pendant[split[3]], s, tips[split[3]]);
    right_sum += right[s];
  }
  double total = 0.0;
  for (int u = 0; u < 4; ++u) {
    total += left[u] * (internal.p_diff * right_sum + (internal.p_same - internal.p_diff) * right[u]);
  }
  return 0.25 * total;
}

void check_branch_lengths(std::span<const double> bl) {
  for (double t : bl) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("branch lengths must be finite and >= 0");
  }
}

}  // namespace

int pattern_class_3taxon(int a, int b, int c) {
  if (a == b && b == c) return 0;
  if (a == b) return 1;
  if (b == c) return 2;
  if (a == c) return 3;
  return 4;
}

const std::array<int, kClasses3>& class_multiplicities_3taxon() {
  static const std::array<int, kClasses3> m{4, 12, 12, 12, 24};
  return m;
}

int pattern_class_4taxon(const std::array<int, 4>& t) {
  return tables4().class_of[t[0] * 64 + t[1] * 16 + t[2] * 4 + t[3]];
}

const std::array<int, kClasses4>& class_multiplicities_4taxon() { return tables4().multiplicity; }

const std::array<std::string, kClasses4>& pattern_class_labels_4taxon() {
  return tables4().label;
}

PatternProbs3 pattern_probs_3taxon(Topology3 topology, const ClockBranchLengths& bl,
                                   const RateModel& rates) {
  check_branch_lengths(std::array{bl.t0, bl.t1});
  const bool star = topology == Topology3::Star;
  const auto& roles = kRoles3[star ? 0 : static_cast<int>(topology)];
  const double t0 = star ? 0.0 : bl.t0;
  const auto& mult = class_multiplicities_3taxon();

  PatternProbs3 out{};
  for (std::size_t k = 0; k < rates.rates().size(); ++k) {
    const double r = rates.rates()[k];
    const JcTransition internal = jc_transition(t0, r);
    const JcTransition cherry = jc_transition(bl.t1, r);
    const JcTransition outgroup = jc_transition(t0 + bl.t1, r);
    for (int c = 0; c < kClasses3; ++c) {
      out[c] += rates.weights()[k] * mult[c] *
                site_prob_3(kRepresentatives3[c], roles, internal, cherry, outgroup);
    }
  }
  return out;
}

std::array<double, 256> raw_pattern_probs_4taxon(const Tree4& tree, const RateModel& rates) {
  check_branch_lengths(tree.branch_lengths);
  const auto& split = kSplits4[split_index(tree.topology)];
  const double t0 = tree.topology == Topology4::Star ? 0.0 : tree.branch_lengths[0];

  std::array<double, 256> out{};
  for (std::size_t k = 0; k < rates.rates().size(); ++k) {
    const double r = rates.rates()[k];
    const JcTransition internal = jc_transition(t0, r);
    std::array<JcTransition, 4> pendant{};
    for (int i = 0; i < 4; ++i) pendant[i] = jc_transition(tree.branch_lengths[i + 1], r);
    for (int i = 0; i < 256; ++i) {
      const std::array<int, 4> tips{i >> 6, (i >> 4) & 3, (i >> 2) & 3, i & 3};
      out[i] += rates.weights()[k] * site_prob_4(tips, split, internal, pendant);
    }
  }
  return out;
}

PatternProbs4 pattern_probs_4taxon(const Tree4& tree, const RateModel& rates) {
  const auto raw = raw_pattern_probs_4taxon(tree, rates);
  const auto& tb = tables4();
  PatternProbs4 out{};
  for (int i = 0; i < 256; ++i) out[tb.class_of[i]] += raw[i];
  return out;
}

PatternProbs4 class_probs_4taxon_fast(const Tree4& tree, const RateModel& rates) {
  const auto& split = kSplits4[split_index(tree.topology)];
  const double t0 = tree.topology == Topology4::Star ? 0.0 : tree.branch_lengths[0];
  const auto& tb = tables4();
  PatternProbs4 out{};
  for (std::size_t k = 0; k < rates.rates().size(); ++k) {
    const double r = rates.rates()[k];
    const JcTransition internal = jc_transition(t0, r);
    std::array<JcTransition, 4> pendant{};
    for (int i = 0; i < 4; ++i) pendant[i] = jc_transition(tree.branch_lengths[i + 1], r);
    for (int c = 0; c < kClasses4; ++c) {
      out[c] += rates.weights()[k] * tb.multiplicity[c] *
                site_prob_4(tb.representative[c], split, internal, pendant);
    }
  }
  return out;
}

SitePatternCounts simulate_alignment(std::span<const double> pattern_probs, long long n,
                                     CountingEngine& rng) {
  const std::size_t k = pattern_probs.size();
  if (k != kClasses3 && k != kClasses4) {
    throw DomainError("simulate_alignment: expected 5 or 15 class probabilities");
  }
  if (n < 0) throw DomainError("simulate_alignment: n must be >= 0");
  double mass = 0.0;
  for (double p : pattern_probs) {
    if (!(p >= 0.0)) throw DomainError("simulate_alignment: negative probability");
    mass += p;
  }
  if (std::abs(mass - 1.0) > 1e-9) throw DomainError("simulate_alignment: probabilities must sum to 1");

  SitePatternCounts out{k == kClasses3 ? 3 : 4, std::vector<long long>(k, 0)};
  long long remaining = n;
  double remaining_mass = 1.0;
  for (std::size_t j = 0; j + 1 < k && remaining > 0; ++j) {
    const double p = remaining_mass > 0.0 ? std::clamp(pattern_probs[j] / remaining_mass, 0.0, 1.0) : 0.0;
    std::binomial_distribution<long long> binom(remaining, p);
    out.counts[j] = p >= 1.0 ? remaining : (p <= 0.0 ? 0 : binom(rng));
    remaining -= out.counts[j];
    remaining_mass -= pattern_probs[j];
  }
  out.counts[k - 1] += remaining;
  return out;
}

SitePatternCounts simulate_alignment(std::span<const double> pattern_probs, long long n,
                                     std::uint64_t seed) {
  CountingEngine rng(seed);
  return simulate_alignment(pattern_probs, n, rng);
}

double log_likelihood(const SitePatternCounts& counts, std::span<const double> pattern_probs) {
  validate(counts);
  if (counts.counts.size() != pattern_probs.size()) {
    throw DomainError("log_likelihood: dimension mismatch");
  }
  double total = 0.0;
  for (std::size_t j = 0; j < pattern_probs.size(); ++j) {
    if (counts.counts[j] == 0) continue;
    if (!(pattern_probs[j] > 0.0)) return -kInf;
    total += static_cast<double>(counts.counts[j]) * std::log(pattern_probs[j]);
  }
  return total;
}

}  // namespace paradox::phylo
