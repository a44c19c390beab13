#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <mutex>
#include <thread>
#include <vector>

#include <json.hpp>

#include "paradox/config.hpp"
#include "paradox/summary.hpp"

namespace paradox::experiments {

struct RunReport {
  std::filesystem::path output_dir;
  nlohmann::json summary;
  std::uint64_t rng_draws = 0;
  long long replicates = 0;
  double wall_seconds = 0.0;
};

/// Validates the config, runs the experiment and writes replicates.csv,
/// summary.json, meta.json (and ternary.csv for tree experiments) into
/// config.output_dir. On failure a FAILED marker holding the error is written
/// before the exception propagates.
RunReport run_experiment(const ExperimentConfig& config);

nlohmann::json to_json(const ExperimentConfig& config);
nlohmann::json to_json(const SummaryStats& stats);

/// Shortest decimal form of a threshold, used as a JSON key ("0.01").
std::string threshold_key(double threshold);

/// Calls fn(i) for i in [0, count) on `workers` threads. Results must be
/// written to per-index slots; the first exception is rethrown.
template <typename Fn>
void parallel_for(std::size_t count, int workers, Fn&& fn) {
  const auto threads = static_cast<std::size_t>(std::max(1, workers));
  if (threads == 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = count;
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < std::min(threads, count); ++t) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace paradox::experiments
