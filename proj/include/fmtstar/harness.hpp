#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "fmtstar/planners.hpp"
#include "fmtstar/smoothing.hpp"

namespace fmtstar {

enum class Algorithm { kFmt, kFmtKnn, kPrm, kRrt, kDiskGraph };

/// "fmt", "fmt-knn", "prm", "rrt", "oracle".
std::string algorithm_name(Algorithm algorithm);
Algorithm parse_algorithm(const std::string& name);

/// One planner execution. For RRT* `n` is the iteration count; for the
/// sample-based planners it is the number of free-space samples.
struct TrialRecord {
  std::string algorithm;
  std::string problem;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  bool success = false;
  double cost = 0.0;  // infinity unless success
  double time_ms = 0.0;
  std::uint64_t collision_checks = 0;
  std::uint64_t cost_evals = 0;
  std::uint64_t iterations = 0;
  bool smoothed = false;

  bool operator==(const TrialRecord&) const = default;
  /// Equality ignoring wall time.
  bool same_outcome(const TrialRecord& other) const;
};

struct AlgorithmSpec {
  std::string id;  // label written to the records
  Algorithm algorithm = Algorithm::kFmt;
  PlannerConfig config;
};

struct SweepConfig {
  ProblemDef problem;
  std::vector<AlgorithmSpec> algorithms;
  std::vector<std::size_t> sample_counts;
  int trials = 50;
  /// Trial i of every cell uses seed seed_base + i.
  std::uint64_t seed_base = 0;
  bool smoothing = false;
  SmoothParams smoothing_params;
  int threads = 0;  // 0 = hardware concurrency

  void validate() const;
};

/// Parses a sweep description. `problem` is a path (relative to `base_dir`),
/// an inline problem object, or a generator object {"generator": kind, ...}.
/// Throws InputError.
SweepConfig sweep_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = ".");

/// Builds a problem from a generator description: kind is maze, bugtrap,
/// clutter or costfield; other keys override the generator's defaults.
ProblemDef generate_environment(const nlohmann::json& spec);

/// Runs one planner. `shared` (when non-null) must be the sample set for
/// (problem, n, seed, config.goal_samples); it is used as is.
TrialRecord run_trial(const AlgorithmSpec& algorithm, const ProblemDef& problem, std::size_t n, std::uint64_t seed,
                      bool smooth, const SmoothParams& smoothing = {}, const SampleSet* shared = nullptr);

struct AggregateRow {
  std::string algorithm;
  std::string problem;
  std::size_t n = 0;
  std::size_t trials = 0;
  std::size_t successes = 0;
  double success_rate = 0.0;
  double mean_cost = 0.0;  // over successes; NaN when none
  double cost_stderr = 0.0;
  double mean_time_ms = 0.0;
  double time_stderr = 0.0;
  double mean_collision_checks = 0.0;
  double mean_cost_evals = 0.0;
  double mean_iterations = 0.0;
  bool stderr_undefined = false;  // fewer than two successes
  bool below_half_success = false;
};

/// Groups by (algorithm, n) in sorted order. Standard errors are sample
/// standard deviation over sqrt(count).
std::vector<AggregateRow> aggregate(const std::vector<TrialRecord>& records);

struct SweepResult {
  std::vector<TrialRecord> records;  // ordered by (algorithm index, n index, trial)
  std::vector<AggregateRow> summary;
};

/// Trials run concurrently; within a (n, seed) pair the sample-based planners
/// share one sample set.
SweepResult run_sweep(const SweepConfig& config);

void write_records_csv(std::ostream& out, const std::vector<TrialRecord>& records);
std::vector<TrialRecord> read_records_csv(std::istream& in);
void write_summary_csv(std::ostream& out, const std::vector<AggregateRow>& rows);

}  // namespace fmtstar
