#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "fmtstar/problem.hpp"
#include "fmtstar/sampling.hpp"

namespace fmtstar {

struct PlannerConfig {
  enum class Variant { kRadial, kKnn };
  /// How line-integral costs enlarge the connection radius.
  enum class CostRadiusFactor { kUpper, kUpperOverLower };

  Variant variant = Variant::kRadial;
  /// Radius slack; unset means e^(1/d) - 1. Mutually exclusive with the
  /// multiplier and the override.
  std::optional<double> eta;
  /// Replaces (1 + eta) in the radius and scales k0 in the kNN variant.
  std::optional<double> radius_multiplier;
  /// Fixed connection radius; bypasses the formula.
  std::optional<double> radius_override;
  /// kNN constant; unset means 2^d e / d.
  std::optional<double> k0;
  std::size_t goal_samples = 1;
  CostRadiusFactor cost_radius_factor = CostRadiusFactor::kUpper;

  struct Rrt {
    double steer_fraction = 0.2;  // of the cube diagonal sqrt(d)
    double goal_bias = 0.05;
    std::optional<double> k0;     // unset means e + e/d
  } rrt;

  bool cache_collisions = true;
  bool record_trace = false;
  bool keep_tree = false;

  /// Throws InputError on inconsistent settings.
  void validate() const;
};

struct Stats {
  std::uint64_t iterations = 0;
  std::uint64_t collision_checks = 0;  // unique edge checks (memo misses)
  std::uint64_t cost_evaluations = 0;
  std::uint64_t near_computations = 0;
  double wall_time_ms = 0.0;
  std::uint64_t smoothing_collision_checks = 0;
};

/// Order of events inside one FMT* run, for invariant checks.
struct PlanTrace {
  std::vector<std::uint32_t> extracted;     // nodes popped as z
  std::vector<double> extracted_costs;      // their cost-to-arrive
  std::vector<std::uint32_t> admitted;      // nodes entering the open set, in order
};

struct Tree {
  static constexpr std::int64_t kNoParent = -1;
  std::vector<std::int64_t> parent;
  std::vector<double> cost_to_arrive;  // infinity when not in the tree
};

struct PlanResult {
  bool success = false;
  std::vector<Point> path;
  std::vector<std::uint32_t> path_nodes;  // vertex indices of `path`
  double cost = std::numeric_limits<double>::infinity();
  Stats stats;
  double radius = 0.0;   // radial variants
  std::size_t k = 0;     // kNN variants
  std::optional<Tree> tree;
  std::optional<PlanTrace> trace;
  std::vector<std::string> warnings;
};

/// eta used when the configuration leaves it unset.
double default_eta(int d);
/// 2^d e / d.
double default_k0(int d);
/// 3^d e (1 + 1/d); k0 must exceed this for the asymptotic guarantee.
double knn_k0_bound(int d);

/// extra * (1 + eta) * 2 * (1/d)^(1/d) * (mu / ball)^(1/d) * (log n / n)^(1/d).
/// `ball_volume` defaults to the Euclidean unit-ball volume.
double connection_radius(std::size_t n, int d, double mu_free, double eta, double extra_multiplier,
                         double ball_volume = 0.0);

/// ceil(k0 log n) clamped to [1, n - 1].
std::size_t knn_count(std::size_t n, int d, double k0);

/// Connection radius for a problem and sample set, folding in the density
/// multiplier, the metric ball volume and the line-integral factor.
double planning_radius(const ProblemDef& problem, const SampleSet& samples, const PlannerConfig& config,
                       std::vector<std::string>* warnings = nullptr);
std::size_t planning_k(const ProblemDef& problem, const SampleSet& samples, const PlannerConfig& config);

/// True when the straight connection u -> v (wrap-aware) misses every obstacle.
bool edge_collision_free(const ProblemDef& problem, PointView u, PointView v);

/// Sum of pair costs along a point sequence.
double path_cost(const CostModel& model, const std::vector<Point>& path);

PlanResult fmt_plan(const ProblemDef& problem, const SampleSet& samples, const PlannerConfig& config);
PlanResult prm_star_plan(const ProblemDef& problem, const SampleSet& samples, const PlannerConfig& config);
PlanResult rrt_star_plan(const ProblemDef& problem, const PlannerConfig& config, std::uint64_t seed,
                         std::size_t iterations);

/// Dijkstra over the r-disk graph {cost(u, v) < r}, optionally dropping edges
/// that hit obstacles. Brute-force edge enumeration; intended as an oracle.
PlanResult disk_graph_shortest_path(const ProblemDef& problem, const SampleSet& samples, double r,
                                    bool prune_obstacle_edges, bool keep_tree = false);

}  // namespace fmtstar
