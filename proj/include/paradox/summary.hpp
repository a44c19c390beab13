#pragma once

#include <array>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace paradox::experiments {

struct SummaryStats {
  std::map<double, double> prob_min_below;  // threshold -> P{P_min < threshold}
  std::map<double, double> prob_max_above;  // threshold -> P{P_max > threshold}
  double mean_min = 0.0;
  double mean_max = 0.0;
  long long reps = 0;
  // Standard errors keyed like the fields above: "prob_min_below", "prob_max_above"
  // hold sqrt(p(1-p)/reps) per threshold; "mean_min", "mean_max" sit at key 0.
  std::map<std::string, std::map<double, double>> mc_se;
};

/// Each sample is a probability vector (its entries sum to 1).
SummaryStats summarize_replicates(const std::vector<std::vector<double>>& samples,
                                  std::span<const double> thresholds);

/// Barycentric histogram over the simplex with bins^2 triangular cells.
/// Row i (0 = nearest the P1 corner) holds 2i + 1 cells; cell (i, j) with
/// j even is upward-pointing, j odd downward.
class TernaryHistogram {
 public:
  explicit TernaryHistogram(int bins);

  int bins() const noexcept { return bins_; }
  void add(const std::array<double, 3>& p);

  /// (row, column) of the cell containing p.
  std::pair<int, int> cell_of(const std::array<double, 3>& p) const;
  std::array<double, 3> centroid(int row, int column) const;

  long long count(int row, int column) const;
  long long total() const noexcept { return total_; }
  long long cells() const noexcept { return static_cast<long long>(bins_) * bins_; }

 private:
  int bins_;
  std::vector<long long> counts_;
  long long total_ = 0;
};

TernaryHistogram ternary_histogram(std::span<const std::array<double, 3>> samples, int bins);

}  // namespace paradox::experiments
