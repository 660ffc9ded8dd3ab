#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "fmtstar/environments.hpp"
#include "fmtstar/errors.hpp"
#include "fmtstar/harness.hpp"

namespace fmtstar {
namespace {

using nlohmann::json;

ProblemDef trap() { return bug_trap_2d(BugTrapSpec{}); }

AlgorithmSpec algo(Algorithm a) { return AlgorithmSpec{algorithm_name(a), a, {}}; }

TEST(RunTrial, DeterministicExceptTime) {
  const TrialRecord a = run_trial(algo(Algorithm::kFmt), trap(), 400, 3, false);
  const TrialRecord b = run_trial(algo(Algorithm::kFmt), trap(), 400, 3, false);
  EXPECT_TRUE(a.same_outcome(b));
  EXPECT_EQ(a.algorithm, "fmt");
  EXPECT_EQ(a.problem, "bugtrap");
}

TEST(RunTrial, NoSamplesFails) {
  const TrialRecord r = run_trial(algo(Algorithm::kFmt), trap(), 0, 1, false);
  EXPECT_FALSE(r.success);
  EXPECT_TRUE(std::isinf(r.cost));
}

TEST(RunTrial, SharedSamplesGiveDominance) {
  const ProblemDef p = trap();
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const SampleSet s = sample_problem(p, 800, 1, seed);
    const TrialRecord f = run_trial(algo(Algorithm::kFmt), p, 800, seed, false, {}, &s);
    const TrialRecord g = run_trial(algo(Algorithm::kPrm), p, 800, seed, false, {}, &s);
    if (f.success) EXPECT_GE(f.cost, g.cost);
    EXPECT_LE(f.collision_checks, g.collision_checks);
  }
}

TEST(RunTrial, SmoothingNeverRaisesCost) {
  const TrialRecord raw = run_trial(algo(Algorithm::kFmt), trap(), 600, 2, false);
  const TrialRecord smooth = run_trial(algo(Algorithm::kFmt), trap(), 600, 2, true);
  ASSERT_TRUE(raw.success);
  EXPECT_TRUE(smooth.smoothed);
  EXPECT_LE(smooth.cost, raw.cost);
  EXPECT_GT(smooth.collision_checks, raw.collision_checks);
}

SweepConfig small_sweep(int threads) {
  SweepConfig c;
  c.problem = trap();
  c.algorithms = {algo(Algorithm::kFmt), algo(Algorithm::kPrm)};
  c.sample_counts = {300, 600};
  c.trials = 4;
  c.seed_base = 10;
  c.threads = threads;
  return c;
}

TEST(RunSweep, ShapeAndSeeds) {
  SweepConfig c = small_sweep(1);
  c.algorithms = {algo(Algorithm::kFmt)};
  c.sample_counts = {300};
  c.trials = 5;
  const SweepResult r = run_sweep(c);
  ASSERT_EQ(r.records.size(), 5u);
  ASSERT_EQ(r.summary.size(), 1u);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(r.records[i].seed, 10 + i);
}

TEST(RunSweep, IndependentOfThreadCount) {
  const SweepResult one = run_sweep(small_sweep(1));
  const SweepResult many = run_sweep(small_sweep(4));
  ASSERT_EQ(one.records.size(), many.records.size());
  for (std::size_t i = 0; i < one.records.size(); ++i) EXPECT_TRUE(one.records[i].same_outcome(many.records[i]));
}

TEST(RunSweep, PairedRecordsShareSamples) {
  const SweepResult r = run_sweep(small_sweep(2));
  const std::size_t half = r.records.size() / 2;
  for (std::size_t i = 0; i < half; ++i) {
    const TrialRecord& f = r.records[i];
    const TrialRecord& g = r.records[half + i];
    ASSERT_EQ(f.seed, g.seed);
    ASSERT_EQ(f.n, g.n);
    if (f.success) EXPECT_GE(f.cost, g.cost);
    EXPECT_LE(f.collision_checks, g.collision_checks);
  }
}

TrialRecord record(std::size_t n, double cost, double time) {
  TrialRecord r;
  r.algorithm = "fmt";
  r.problem = "p";
  r.n = n;
  r.success = std::isfinite(cost);
  r.cost = cost;
  r.time_ms = time;
  return r;
}

TEST(Aggregate, SingleRecord) {
  const auto rows = aggregate({record(10, 2.5, 1.0)});
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].mean_cost, 2.5);
  EXPECT_EQ(rows[0].cost_stderr, 0.0);
  EXPECT_TRUE(rows[0].stderr_undefined);
}

TEST(Aggregate, EqualCostsHaveZeroError) {
  const auto rows = aggregate({record(10, 2.0, 1.0), record(10, 2.0, 3.0)});
  EXPECT_EQ(rows[0].cost_stderr, 0.0);
  EXPECT_FALSE(rows[0].stderr_undefined);
}

TEST(Aggregate, ThreeValues) {
  const auto rows = aggregate({record(10, 1.0, 1.0), record(10, 2.0, 1.0), record(10, 3.0, 1.0)});
  EXPECT_DOUBLE_EQ(rows[0].mean_cost, 2.0);
  EXPECT_NEAR(rows[0].cost_stderr, 0.57735, 1e-5);
}

TEST(Aggregate, AllFailures) {
  const double inf = std::numeric_limits<double>::infinity();
  const auto rows = aggregate({record(10, inf, 1.0), record(10, inf, 1.0)});
  EXPECT_EQ(rows[0].success_rate, 0.0);
  EXPECT_TRUE(std::isnan(rows[0].mean_cost));
  EXPECT_TRUE(rows[0].below_half_success);
  std::ostringstream out;
  write_summary_csv(out, rows);
  EXPECT_NE(out.str().find("fmt,p,10,2,0,,,"), std::string::npos);
}

TEST(Aggregate, RecomputableFromRecords) {
  const SweepResult r = run_sweep(small_sweep(2));
  for (const AggregateRow& row : r.summary) {
    std::vector<double> costs;
    for (const auto& rec : r.records) {
      if (rec.algorithm == row.algorithm && rec.n == row.n && rec.success) costs.push_back(rec.cost);
    }
    ASSERT_EQ(costs.size(), row.successes);
    double mean = 0.0;
    for (double c : costs) mean += c;
    mean /= costs.size();
    double ss = 0.0;
    for (double c : costs) ss += (c - mean) * (c - mean);
    EXPECT_NEAR(row.mean_cost, mean, 1e-12);
    EXPECT_NEAR(row.cost_stderr, std::sqrt(ss / (costs.size() - 1)) / std::sqrt(costs.size()), 1e-12);
  }
  for (std::size_t i = 1; i < r.summary.size(); ++i) {
    const auto& a = r.summary[i - 1];
    const auto& b = r.summary[i];
    EXPECT_TRUE(a.algorithm < b.algorithm || (a.algorithm == b.algorithm && a.n < b.n));
  }
}

TEST(Csv, RoundTrip) {
  SweepResult r = run_sweep(small_sweep(2));
  r.records[0].success = false;
  r.records[0].cost = std::numeric_limits<double>::infinity();
  std::stringstream ss;
  write_records_csv(ss, r.records);
  EXPECT_EQ(ss.str().substr(0, ss.str().find('\n')),
            "algorithm,problem,n,seed,success,cost,time_ms,collision_checks,cost_evals,iterations,smoothed");
  EXPECT_EQ(read_records_csv(ss), r.records);
}

TEST(SweepConfig, ParsesGeneratorsAndRejectsBadInput) {
  const json j = {{"problem", {{"generator", "maze"}, {"dim", 3}}},
                  {"algorithms", {"fmt", {{"algo", "fmt"}, {"id", "fmt-eta1"}, {"eta", 1.0}}, "prm"}},
                  {"sample_counts", {100, 200}},
                  {"trials", 3}};
  const SweepConfig c = sweep_from_json(j);
  EXPECT_EQ(c.problem.dim(), 3);
  ASSERT_EQ(c.algorithms.size(), 3u);
  EXPECT_EQ(c.algorithms[1].id, "fmt-eta1");
  EXPECT_EQ(*c.algorithms[1].config.eta, 1.0);
  EXPECT_EQ(c.trials, 3);

  json bad = j;
  bad.erase("algorithms");
  EXPECT_THROW(sweep_from_json(bad), InputError);
  bad = j;
  bad["algorithms"] = {"astar"};
  EXPECT_THROW(sweep_from_json(bad), InputError);
  bad = j;
  bad["algorithms"] = {{{"algo", "fmt"}, {"eta", 1.0}, {"rm", 1.0}}};
  EXPECT_THROW(sweep_from_json(bad), InputError);
}

}  // namespace
}  // namespace fmtstar
