#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "paradox/config.hpp"
#include "paradox/experiments.hpp"
#include "paradox/summary.hpp"

namespace fs = std::filesystem;
using namespace paradox::experiments;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("paradox_test_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Minimal CSV reader; the writer never quotes.
std::vector<std::vector<std::string>> read_csv(const fs::path& path) {
  std::ifstream in(path);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

const std::vector<double> kThresholds{0.01, 0.05, 0.95, 0.99};

ExperimentConfig small_star3(const fs::path& dir) {
  ExperimentConfig c = default_config(ExperimentKind::Star3WrongIndistinct);
  c.n = {200, 1000};
  c.reps = 40;
  c.quadrature_points = 32;
  c.output_dir = dir;
  return c;
}

ExperimentConfig small_star4(const fs::path& dir) {
  ExperimentConfig c = default_config(ExperimentKind::Star4WrongDistinct);
  c.n = {300};
  c.reps = 6;
  c.mcmc.iterations = 4000;
  c.output_dir = dir;
  return c;
}

}  // namespace

TEST(ConfigTest, ParsesKeyValues) {
  const auto kv = parse_key_values(
      "# comment\n[run]\nexperiment = \"coin\"\nreps = 20  # trailing\nn = [1000, 10000]\np-true = 0.5\n");
  EXPECT_EQ(kv.at("experiment"), "\"coin\"");  // raw; quotes go at override time
  EXPECT_EQ(kv.at("reps"), "20");
  EXPECT_EQ(kv.at("p_true"), "0.5");
  EXPECT_EQ(parse_n_list(kv.at("n")), (std::vector<long long>{1000, 10000}));
  EXPECT_EQ(parse_n_list("3:6"), (std::vector<long long>{3, 4, 5, 6}));
  EXPECT_EQ(parse_n_list("1e4"), (std::vector<long long>{10000}));
  EXPECT_THROW(parse_n_list("6:3"), ConfigError);
  EXPECT_THROW(parse_n_list("abc"), ConfigError);
}

TEST(ConfigTest, OverridesAndRejectsUnknownKeys) {
  ExperimentConfig c = default_config(ExperimentKind::BalanceVar);
  EXPECT_DOUBLE_EQ(c.tau1, 0.3);
  apply_overrides(c, {{"reps", "50"}, {"seed", "7"}, {"tau2", "2.5"}});
  EXPECT_EQ(c.reps, 50);
  EXPECT_EQ(c.seed, 7u);
  EXPECT_DOUBLE_EQ(c.tau2, 2.5);
  EXPECT_THROW(apply_overrides(c, {{"no_such_key", "1"}}), ConfigError);
  EXPECT_THROW(apply_overrides(c, {{"reps", "many"}}), ConfigError);
}

TEST(ConfigTest, ValidationCatchesBadValues) {
  ExperimentConfig c = default_config(ExperimentKind::Coin);
  EXPECT_NO_THROW(validate(c));
  c.reps = 0;
  EXPECT_THROW(validate(c), ConfigError);
  c = default_config(ExperimentKind::Coin);
  c.alpha = 0.7;
  EXPECT_THROW(validate(c), ConfigError);
  c = default_config(ExperimentKind::BalanceVar);
  c.n = {1};
  EXPECT_THROW(validate(c), ConfigError);
  c = default_config(ExperimentKind::Table1);
  c.n.clear();
  EXPECT_THROW(validate(c), ConfigError);
}

TEST(ConfigTest, LoadConfigFileAndKindConflict) {
  const fs::path dir = scratch("config");
  fs::create_directories(dir);
  const fs::path file = dir / "run.toml";
  std::ofstream(file) << "experiment = \"balance-sign\"\nreps = 12\nn = 500\n";
  const auto c = load_config(file);
  EXPECT_EQ(c.experiment, ExperimentKind::BalanceSign);
  EXPECT_EQ(c.reps, 12);
  EXPECT_EQ(c.n, (std::vector<long long>{500}));
  EXPECT_THROW(load_config(file, ExperimentKind::Coin), ConfigError);
  EXPECT_THROW(load_config(dir / "missing.toml"), ConfigError);
  fs::remove_all(dir);
}

TEST(ConfigTest, ExperimentNamesRoundTrip) {
  for (auto kind : {ExperimentKind::Coin, ExperimentKind::CoinScan, ExperimentKind::BalanceSign,
                    ExperimentKind::BalanceVar, ExperimentKind::Star3Right,
                    ExperimentKind::Star3WrongIndistinct, ExperimentKind::Star4WrongDistinct,
                    ExperimentKind::Table1, ExperimentKind::Table2, ExperimentKind::DecompositionDemo}) {
    EXPECT_EQ(parse_experiment_kind(to_string(kind)), kind);
    EXPECT_NO_THROW(validate(default_config(kind))) << to_string(kind);
  }
  EXPECT_FALSE(parse_experiment_kind("star5"));
}

TEST(SummaryTest, UniformPosteriorsAreNeverExtreme) {
  const std::vector<std::vector<double>> samples(5, {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
  const auto s = summarize_replicates(samples, kThresholds);
  EXPECT_EQ(s.reps, 5);
  EXPECT_EQ(s.prob_max_above.at(0.95), 0.0);
  EXPECT_EQ(s.prob_max_above.at(0.99), 0.0);
  EXPECT_EQ(s.prob_min_below.at(0.01), 0.0);
  EXPECT_NEAR(s.mean_max, 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(s.mean_min, 1.0 / 3.0, 1e-15);
  EXPECT_EQ(s.mc_se.at("prob_max_above").at(0.99), 0.0);
}

TEST(SummaryTest, CornerPosteriorsAreAlwaysExtreme) {
  const std::vector<std::vector<double>> samples{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {0, 1, 0}};
  const auto s = summarize_replicates(samples, kThresholds);
  EXPECT_EQ(s.prob_max_above.at(0.99), 1.0);
  EXPECT_EQ(s.prob_min_below.at(0.01), 1.0);
  EXPECT_EQ(s.mean_min, 0.0);
  EXPECT_EQ(s.mean_max, 1.0);
}

TEST(SummaryTest, MixedSampleAndStandardErrors) {
  const std::vector<std::vector<double>> samples{{0.5, 0.5}, {0.995, 0.005}, {0.2, 0.8}, {0.999, 0.001}};
  const auto s = summarize_replicates(samples, kThresholds);
  EXPECT_DOUBLE_EQ(s.prob_max_above.at(0.99), 0.5);
  EXPECT_DOUBLE_EQ(s.prob_min_below.at(0.01), 0.5);
  EXPECT_DOUBLE_EQ(s.prob_max_above.at(0.95), 0.5);
  EXPECT_DOUBLE_EQ(s.mc_se.at("prob_max_above").at(0.99), std::sqrt(0.25 / 4.0));
  EXPECT_NEAR(s.mean_max, (0.5 + 0.995 + 0.8 + 0.999) / 4.0, 1e-15);
}

TEST(SummaryTest, RejectsEmptyAndNonSimplexInput) {
  EXPECT_ANY_THROW(summarize_replicates({}, kThresholds));
  EXPECT_ANY_THROW(summarize_replicates({{0.5, 0.6}}, kThresholds));
  EXPECT_ANY_THROW(summarize_replicates({{-0.1, 1.1}}, kThresholds));
}

TEST(TernaryTest, CellsPartitionTheSimplex) {
  const int bins = 10;
  TernaryHistogram h(bins);
  EXPECT_EQ(h.cells(), 100);
  // Corners sit in the three corner cells.
  EXPECT_EQ(h.cell_of({1, 0, 0}), std::make_pair(0, 0));
  EXPECT_EQ(h.cell_of({0, 1, 0}).first, bins - 1);
  EXPECT_EQ(h.cell_of({0, 0, 1}).first, bins - 1);
  EXPECT_NE(h.cell_of({0, 1, 0}), h.cell_of({0, 0, 1}));

  // Every centroid maps back to its own cell, and each cell is visited once.
  std::set<std::pair<int, int>> seen;
  for (int row = 0; row < bins; ++row) {
    for (int col = 0; col <= 2 * row; ++col) {
      const auto c = h.centroid(row, col);
      EXPECT_NEAR(c[0] + c[1] + c[2], 1.0, 1e-14);
      EXPECT_EQ(h.cell_of(c), std::make_pair(row, col));
      seen.insert({row, col});
    }
  }
  EXPECT_EQ(static_cast<long long>(seen.size()), h.cells());
}

TEST(TernaryTest, CountsSumToSampleSizeAndCentreIsCentral) {
  std::vector<std::array<double, 3>> pts;
  for (int i = 0; i <= 20; ++i) {
    for (int j = 0; i + j <= 20; ++j) pts.push_back({i / 20.0, j / 20.0, (20 - i - j) / 20.0});
  }
  pts.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
  const auto h = ternary_histogram(pts, 7);
  long long total = 0;
  for (int row = 0; row < 7; ++row) {
    for (int col = 0; col <= 2 * row; ++col) total += h.count(row, col);
  }
  EXPECT_EQ(total, static_cast<long long>(pts.size()));
  EXPECT_EQ(h.total(), total);
  const auto centre = h.cell_of({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
  const auto c = h.centroid(centre.first, centre.second);
  for (double v : c) EXPECT_NEAR(v, 1.0 / 3.0, 1.0 / 7.0);
}

TEST(ParallelForTest, CoversEveryIndexAndPropagatesErrors) {
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i] += 1; });
  for (int h : hits) EXPECT_EQ(h, 1);
  EXPECT_THROW(parallel_for(100, 3,
                            [](std::size_t i) {
                              if (i == 57) throw std::runtime_error("boom");
                            }),
               std::runtime_error);
}

TEST(RunTest, CoinExactSummaryMatchesKnownValue) {
  ExperimentConfig c = default_config(ExperimentKind::Coin);
  c.n = {1000};
  c.output_dir = scratch("coin");
  const auto report = run_experiment(c);
  const auto& r = report.summary.at("results").at(0);
  EXPECT_EQ(r.at("n").get<long long>(), 1000);
  EXPECT_NEAR(r.at("prob_nonextreme").get<double>(), 0.272, 5e-4);
  for (const char* f : {"replicates.csv", "summary.json", "meta.json"}) {
    EXPECT_TRUE(fs::exists(c.output_dir / f)) << f;
  }
  const auto meta = nlohmann::json::parse(slurp(c.output_dir / "meta.json"));
  EXPECT_EQ(meta.at("experiment"), "coin");
  EXPECT_EQ(meta.at("seed").get<std::uint64_t>(), c.seed);
  fs::remove_all(c.output_dir);
}

TEST(RunTest, RerunIsByteIdentical) {
  ExperimentConfig c = small_star3(scratch("rerun_a"));
  run_experiment(c);
  const std::string first = slurp(c.output_dir / "replicates.csv");
  const std::string first_ternary = slurp(c.output_dir / "ternary.csv");
  const fs::path a = c.output_dir;
  c.output_dir = scratch("rerun_b");
  run_experiment(c);
  EXPECT_FALSE(first.empty());
  EXPECT_EQ(first, slurp(c.output_dir / "replicates.csv"));
  EXPECT_EQ(first_ternary, slurp(c.output_dir / "ternary.csv"));

  c.seed += 1;
  const fs::path d = scratch("rerun_c");
  c.output_dir = d;
  run_experiment(c);
  EXPECT_NE(first, slurp(d / "replicates.csv"));
  for (const auto& p : {a, c.output_dir}) fs::remove_all(p);
}

TEST(RunTest, WorkersDoNotChangeResults) {
  ExperimentConfig serial = small_star4(scratch("serial"));
  ExperimentConfig threaded = small_star4(scratch("threaded"));
  threaded.workers = 4;
  const auto rs = run_experiment(serial);
  const auto rt = run_experiment(threaded);
  EXPECT_EQ(slurp(serial.output_dir / "replicates.csv"), slurp(threaded.output_dir / "replicates.csv"));
  EXPECT_EQ(rs.rng_draws, rt.rng_draws);
  EXPECT_EQ(rs.summary.at("results"), rt.summary.at("results"));
  fs::remove_all(serial.output_dir);
  fs::remove_all(threaded.output_dir);
}

TEST(RunTest, SummaryRecomputedFromCsvMatchesExactly) {
  ExperimentConfig c = small_star3(scratch("recompute"));
  const auto report = run_experiment(c);
  const auto rows = read_csv(c.output_dir / "replicates.csv");
  ASSERT_EQ(rows.size(), 1u + c.n.size() * static_cast<std::size_t>(c.reps));
  EXPECT_EQ(rows[0][2], "p1");

  for (std::size_t k = 0; k < c.n.size(); ++k) {
    const std::string n = std::to_string(c.n[k]);
    long long above99 = 0, below01 = 0, count = 0;
    double sum_max = 0.0;
    for (std::size_t r = 1; r < rows.size(); ++r) {
      if (rows[r][1] != n) continue;
      const double p1 = std::stod(rows[r][2]), p2 = std::stod(rows[r][3]), p3 = std::stod(rows[r][4]);
      const double hi = std::max({p1, p2, p3});
      const double lo = std::min({p1, p2, p3});
      above99 += hi > 0.99;
      below01 += lo < 0.01;
      sum_max += hi;
      ++count;
    }
    ASSERT_EQ(count, c.reps);
    const auto& stats = report.summary.at("results").at(k).at("stats");
    EXPECT_EQ(stats.at("prob_max_above").at("0.99").get<double>(), static_cast<double>(above99) / count);
    EXPECT_EQ(stats.at("prob_min_below").at("0.01").get<double>(), static_cast<double>(below01) / count);
    EXPECT_NEAR(stats.at("mean_max").get<double>(), sum_max / count, 1e-15);
  }
  // The file on disk carries the same numbers.
  const auto disk = nlohmann::json::parse(slurp(c.output_dir / "summary.json"));
  EXPECT_EQ(disk.at("results"), report.summary.at("results"));
  fs::remove_all(c.output_dir);
}

TEST(RunTest, FailureLeavesMarkerAndSuccessClearsIt) {
  ExperimentConfig c = default_config(ExperimentKind::Coin);
  c.n = {100};
  c.output_dir = scratch("failed");
  // A directory where the CSV should go makes the write fail.
  fs::create_directories(c.output_dir / "replicates.csv");
  EXPECT_ANY_THROW(run_experiment(c));
  ASSERT_TRUE(fs::exists(c.output_dir / "FAILED"));
  EXPECT_NE(slurp(c.output_dir / "FAILED").find("replicates.csv"), std::string::npos);

  fs::remove_all(c.output_dir / "replicates.csv");
  EXPECT_NO_THROW(run_experiment(c));
  EXPECT_FALSE(fs::exists(c.output_dir / "FAILED"));
  fs::remove_all(c.output_dir);
}

TEST(RunTest, InvalidConfigIsRejectedBeforeAnyOutput) {
  ExperimentConfig c = default_config(ExperimentKind::BalanceSign);
  c.reps = 0;
  c.output_dir = scratch("invalid");
  EXPECT_THROW(run_experiment(c), ConfigError);
  EXPECT_FALSE(fs::exists(c.output_dir));
}

#ifdef PARADOX_CLI_PATH
TEST(CliTest, ExitCodes) {
  const fs::path dir = scratch("cli");
  const std::string cli = PARADOX_CLI_PATH;
  const std::string quiet = " > /dev/null 2>&1";
  auto run = [&](const std::string& args) {
    const int status = std::system((cli + " " + args + quiet).c_str());
    return WEXITSTATUS(status);
  };
  EXPECT_EQ(run("coin --reps 0 --out " + dir.string()), 2);
  EXPECT_EQ(run("not-an-experiment"), 2);
  EXPECT_EQ(run("coin --n 100 --out " + dir.string()), 0);
  EXPECT_TRUE(fs::exists(dir / "summary.json"));
  EXPECT_NE(run("coin --exact --simulate"), 0);
  fs::remove_all(dir);
}
#endif
