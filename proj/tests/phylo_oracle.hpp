#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "paradox/phylo.hpp"

namespace paradox::oracle {

using phylo::ClockBranchLengths;
using phylo::Topology3;
using phylo::Topology4;
using phylo::Tree4;

// Brute-force oracle. Nodes 0..leaves-1 are tips; edges hang each child off a
// parent; node `root` carries the uniform stationary distribution. Every
// assignment of nucleotides to all nodes is enumerated. Under Gamma(alpha)
// rates the product of JC edge factors 1/4 + (d - 1/4) exp(-4 r t / 3) is
// expanded over edge subsets S, and E exp(-4 r T_S / 3) = (1 + 4 T_S / (3 alpha))^-alpha.
struct Edge {
  int parent;
  int child;
  double length;
};

inline std::vector<double> oracle_raw(int leaves, int nodes, int root, const std::vector<Edge>& edges, double alpha) {
  const int k = static_cast<int>(edges.size());
  std::vector<double> out(static_cast<std::size_t>(std::pow(4, leaves)), 0.0);
  std::vector<int> state(nodes);
  const long long total = static_cast<long long>(std::pow(4, nodes));
  for (long long code = 0; code < total; ++code) {
    long long c = code;
    for (int v = nodes - 1; v >= 0; --v) {
      state[v] = static_cast<int>(c % 4);
      c /= 4;
    }
    double prob = 0.0;
    for (int subset = 0; subset < (1 << k); ++subset) {
      double coef = 1.0;
      double length = 0.0;
      for (int e = 0; e < k; ++e) {
        const bool same = state[edges[e].parent] == state[edges[e].child];
        if (subset & (1 << e)) {
          coef *= (same ? 1.0 : 0.0) - 0.25;
          length += edges[e].length;
        } else {
          coef *= 0.25;
        }
      }
      const double laplace = std::isinf(alpha) ? std::exp(-4.0 * length / 3.0)
                                               : std::pow(1.0 + 4.0 * length / (3.0 * alpha), -alpha);
      prob += coef * laplace;
    }
    (void)root;
    long long index = 0;
    for (int v = 0; v < leaves; ++v) index = index * 4 + state[v];
    out[static_cast<std::size_t>(index)] += 0.25 * prob;
  }
  return out;
}

inline std::vector<Edge> clock3_edges(Topology3 top, ClockBranchLengths bl) {
  // Tips 0..2 = a, b, c; node 3 = root; node 4 = cherry ancestor.
  if (top == Topology3::Star) return {{3, 0, bl.t1}, {3, 1, bl.t1}, {3, 2, bl.t1}};
  const int out = top == Topology3::T1 ? 2 : top == Topology3::T2 ? 0 : 1;
  std::vector<Edge> e{{3, 4, bl.t0}, {3, out, bl.t0 + bl.t1}};
  for (int tip = 0; tip < 3; ++tip) {
    if (tip != out) e.push_back({4, tip, bl.t1});
  }
  return e;
}

inline int oracle_class3(int a, int b, int c) {
  if (a == b && b == c) return 0;
  if (a == b) return 1;
  if (b == c) return 2;
  if (a == c) return 3;
  return 4;
}

inline std::array<double, 5> oracle_classes3(Topology3 top, ClockBranchLengths bl, double alpha) {
  const int nodes = top == Topology3::Star ? 4 : 5;
  const auto raw = oracle_raw(3, nodes, 3, clock3_edges(top, bl), alpha);
  std::array<double, 5> out{};
  for (int i = 0; i < 64; ++i) out[oracle_class3(i / 16, (i / 4) % 4, i % 4)] += raw[i];
  return out;
}

inline std::vector<Edge> unrooted4_edges(const Tree4& t) {
  // Tips 0..3 = a..d; node 4 joins the first pair, node 5 the second.
  const auto& b = t.branch_lengths;
  if (t.topology == Topology4::Star) return {{4, 0, b[1]}, {4, 1, b[2]}, {4, 2, b[3]}, {4, 3, b[4]}};
  const int partner = t.topology == Topology4::T1 ? 1 : t.topology == Topology4::T2 ? 2 : 3;
  std::vector<Edge> e{{4, 5, b[0]}, {4, 0, b[1]}, {4, partner, b[1 + partner]}};
  for (int tip = 1; tip < 4; ++tip) {
    if (tip != partner) e.push_back({5, tip, b[1 + tip]});
  }
  return e;
}

inline std::vector<double> oracle_raw4(const Tree4& t, double alpha) {
  const int nodes = t.topology == Topology4::Star ? 5 : 6;
  return oracle_raw(4, nodes, 4, unrooted4_edges(t), alpha);
}

}  // namespace paradox::oracle
