#pragma once

#include <cstdint>
#include <vector>

#include "fmtstar/problem.hpp"

namespace fmtstar {

struct SmoothParams {
  int max_rounds = 30;
  int stall_rounds = 3;
  /// Random shortcut attempts per round, as a multiple of the vertex count.
  double random_attempts_per_vertex = 1.0;
  /// Single-axis shortcut attempts per round, same scaling.
  double partial_attempts_per_vertex = 0.5;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SmoothResult {
  std::vector<Point> path;
  double cost = 0.0;
  std::uint64_t collision_checks = 0;
  int rounds = 0;
  std::vector<double> cost_trace;  // cost after each round, starting with the input cost
};

/// Shortcut smoothing: alternating vertex passes (drop a vertex, or replace it
/// by a bridge between points on its incident segments), random two-point
/// shortcuts, and single-axis straightening over short vertex runs. Segment
/// checks are memoized; `collision_checks` counts distinct segments. Output is collision-free, keeps both endpoints, and never costs
/// more than the input. Throws InputError if the input path collides.
SmoothResult adaptive_shortcut(const std::vector<Point>& path, const World& world, const CostModel& model,
                               const SmoothParams& params);

}  // namespace fmtstar
