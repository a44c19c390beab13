#include "paradox/summary.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "paradox/numerics.hpp"

namespace paradox::experiments {

namespace {

double proportion_se(double p, double reps) { return std::sqrt(p * (1.0 - p) / reps); }

double mean_se(const std::vector<double>& v, double mean) {
  if (v.size() < 2) return 0.0;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  const double n = static_cast<double>(v.size());
  return std::sqrt(ss / (n - 1.0) / n);
}

}  // namespace

SummaryStats summarize_replicates(const std::vector<std::vector<double>>& samples,
                                  std::span<const double> thresholds) {
  if (samples.empty()) throw DomainError("summarize_replicates: no samples");
  std::vector<double> mins;
  std::vector<double> maxs;
  mins.reserve(samples.size());
  maxs.reserve(samples.size());
  for (const auto& s : samples) {
    if (s.empty()) throw DomainError("summarize_replicates: empty probability vector");
    const double total = std::accumulate(s.begin(), s.end(), 0.0);
    const bool in_range = std::all_of(s.begin(), s.end(), [](double p) { return p >= 0.0 && p <= 1.0; });
    if (!in_range || std::abs(total - 1.0) > 1e-9) {
      throw DomainError("summarize_replicates: sample is not a probability vector");
    }
    const auto [lo, hi] = std::minmax_element(s.begin(), s.end());
    mins.push_back(*lo);
    maxs.push_back(*hi);
  }

  SummaryStats out;
  out.reps = static_cast<long long>(samples.size());
  const double reps = static_cast<double>(out.reps);
  for (double t : thresholds) {
    const auto below = std::count_if(mins.begin(), mins.end(), [t](double v) { return v < t; });
    const auto above = std::count_if(maxs.begin(), maxs.end(), [t](double v) { return v > t; });
    const double pb = static_cast<double>(below) / reps;
    const double pa = static_cast<double>(above) / reps;
    out.prob_min_below[t] = pb;
    out.prob_max_above[t] = pa;
    out.mc_se["prob_min_below"][t] = proportion_se(pb, reps);
    out.mc_se["prob_max_above"][t] = proportion_se(pa, reps);
  }
  out.mean_min = std::accumulate(mins.begin(), mins.end(), 0.0) / reps;
  out.mean_max = std::accumulate(maxs.begin(), maxs.end(), 0.0) / reps;
  out.mc_se["mean_min"][0.0] = mean_se(mins, out.mean_min);
  out.mc_se["mean_max"][0.0] = mean_se(maxs, out.mean_max);
  return out;
}

TernaryHistogram::TernaryHistogram(int bins) : bins_(bins) {
  if (bins < 1) throw DomainError("TernaryHistogram: bins must be >= 1");
  counts_.assign(static_cast<std::size_t>(bins) * static_cast<std::size_t>(bins), 0);
}

std::pair<int, int> TernaryHistogram::cell_of(const std::array<double, 3>& p) const {
  const double total = p[0] + p[1] + p[2];
  if (!(total > 0.0) || std::any_of(p.begin(), p.end(), [](double v) { return !(v >= 0.0); })) {
    throw DomainError("TernaryHistogram: point is not on the simplex");
  }
  const int b = bins_;
  std::array<int, 3> f{};
  for (int k = 0; k < 3; ++k) {
    f[k] = std::clamp(static_cast<int>(std::floor(p[k] / total * b)), 0, b - 1);
  }
  // Points on cell edges can floor to sum b; fold them into a neighbouring cell.
  for (int k = 0; k < 3 && f[0] + f[1] + f[2] > b - 1; ++k) {
    while (f[k] > 0 && f[0] + f[1] + f[2] > b - 1) --f[k];
  }
  // Rounding can also leave the sum below b - 2; the nearest down cell absorbs it.
  while (f[0] + f[1] + f[2] < b - 2) {
    const auto k = static_cast<std::size_t>(
        std::max_element(p.begin(), p.end()) - p.begin());
    ++f[k];
  }
  const bool up = f[0] + f[1] + f[2] == b - 1;
  const int row = b - 1 - f[0];
  const int column = up ? 2 * f[1] : 2 * f[1] + 1;
  return {row, column};
}

std::array<double, 3> TernaryHistogram::centroid(int row, int column) const {
  if (row < 0 || row >= bins_ || column < 0 || column > 2 * row) {
    throw DomainError("TernaryHistogram: cell out of range");
  }
  const double b = bins_;
  const int fa = bins_ - 1 - row;
  if (column % 2 == 0) {
    const int fb = column / 2;
    const int fc = row - fb;
    return {(fa + 1.0 / 3.0) / b, (fb + 1.0 / 3.0) / b, (fc + 1.0 / 3.0) / b};
  }
  const int fb = (column - 1) / 2;
  const int fc = row - 1 - fb;
  return {(fa + 2.0 / 3.0) / b, (fb + 2.0 / 3.0) / b, (fc + 2.0 / 3.0) / b};
}

void TernaryHistogram::add(const std::array<double, 3>& p) {
  const auto [row, column] = cell_of(p);
  ++counts_[static_cast<std::size_t>(row * row + column)];
  ++total_;
}

long long TernaryHistogram::count(int row, int column) const {
  if (row < 0 || row >= bins_ || column < 0 || column > 2 * row) {
    throw DomainError("TernaryHistogram: cell out of range");
  }
  return counts_[static_cast<std::size_t>(row * row + column)];
}

TernaryHistogram ternary_histogram(std::span<const std::array<double, 3>> samples, int bins) {
  TernaryHistogram h(bins);
  for (const auto& p : samples) h.add(p);
  return h;
}

}  // namespace paradox::experiments
