#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "fmtstar/problem.hpp"
#include "fmtstar/sampling.hpp"

namespace fmtstar {

// Brute-force references used by the test suites and the `oracle` CLI command.

struct GridSpec {
  enum class Connectivity { kAxis, kFullDiagonal };
  int resolution = 64;  // cells per axis, at least 16
  Connectivity connectivity = Connectivity::kFullDiagonal;

  void validate(int dim) const;
};

struct GridResult {
  bool feasible = false;
  double cost = std::numeric_limits<double>::infinity();
  std::vector<Point> path;  // x_init, then cell centers
  std::uint64_t cells_settled = 0;
};

/// Dijkstra over cell centers. A cell is free when its center is; a move is
/// allowed when the segment between centers is collision-free and costs the
/// model's pair cost. The path starts at x_init, steps to its cell center and
/// ends at the first settled cell whose center lies in the closed goal region
/// (or the cell holding the goal center). Axis connectivity overestimates a
/// Euclidean optimum by up to a factor sqrt(d); full-diagonal by at most
/// sqrt(4 - 2 sqrt 2) ~ 1.082 in 2D, plus one cell diagonal at each end.
GridResult grid_dijkstra(const ProblemDef& problem, const GridSpec& spec);

/// Minimum cost over all simple paths from sample 0 to a goal sample in the
/// graph {cost(u, v) < r, segment collision-free}. Infinity when disconnected.
/// Requires n <= 20.
double exhaustive_shortest_path(const SampleSet& samples, double r, const ProblemDef& problem);

/// Four-node lazy-connection trap: x_init, u1, u2, x with x the goal sample.
/// u1 is x's optimal parent in the collision-pruned graph, u2 is blocked from
/// x by the single obstacle.
enum class LazyTrapVariant {
  kAllConditions,
  kNoObstacle,    // u2 reaches x
  kU2First,       // u2 leaves the open set before u1
  kU1Cheaper,     // connecting through u2 is not cheaper even ignoring obstacles
};

struct LazyTrapInstance {
  ProblemDef problem;
  SampleSet samples;
  double r = 0.0;
  static constexpr std::uint32_t kInit = 0, kU1 = 1, kU2 = 2, kX = 3;
};

LazyTrapInstance lazy_trap_instance(LazyTrapVariant variant = LazyTrapVariant::kAllConditions);

struct LazyTrapConditions {
  bool within_radius;      // |u2 - x| < r
  bool u2_costlier;        // c(u2) > c(u1)
  bool u2_cheaper_free;    // c(u2) + |u2 - x| < c(u1) + |u1 - x|
  bool u2_blocked;         // segment u2-x hits the obstacle
  bool all() const { return within_radius && u2_costlier && u2_cheaper_free && u2_blocked; }
};

/// Evaluates the four conditions with cost-to-arrive taken from the
/// collision-pruned disk graph.
LazyTrapConditions lazy_trap_conditions(const LazyTrapInstance& instance);

}  // namespace fmtstar
