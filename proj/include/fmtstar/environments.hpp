#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fmtstar/problem.hpp"

namespace fmtstar {

// Recursive maze. The 2D base is an S-shaped corridor: two walls of
// thickness t split the square into three corridors joined by gaps at
// alternating ends. The maze in dimension j stacks two copies of the
// (j-1)-maze along axis j, the upper one mirrored so that it starts where the
// lower one ends, separated by a divider slab whose only opening sits over
// the lower copy's terminal cell.
struct MazeSpec {
  int dim = 2;
  double wall_thickness = 0.1;
  /// Width of each wall gap as a fraction of the cube side.
  double corridor_fraction = 0.3;
  double goal_radius = 0.05;

  void validate() const;
};

struct MazeLayout {
  ProblemDef problem;
  /// Faces every start-to-goal path crosses, in order. Consecutive faces
  /// bound a convex free cell.
  std::vector<Aabb> gates;
  Aabb start_region;
  Aabb terminal_region;
};

MazeLayout build_maze(const MazeSpec& spec);
ProblemDef recursive_maze(const MazeSpec& spec);

/// Minimum of |start - p_1| + sum |p_i - p_{i+1}| + |p_m - q| over p_i in
/// gate i and q in the closed goal ball. Solved by accelerated projected
/// gradient; stops when a unit projected-gradient step moves less than
/// `tolerance`.
double gate_chain_length(PointView start, const std::vector<Aabb>& gates, PointView goal_center, double goal_radius,
                         double tolerance = 1e-5);

/// Shortest feasible path length of the maze (infimum; paths may touch walls).
double maze_optimal_cost(const MazeSpec& spec);

// Rectilinear bug trap: a square cavity open on the +x side through a mouth
// corridor formed by two inward lips.
struct BugTrapSpec {
  Point center{0.5, 0.5};
  double outer_radius = 0.3;  // half side of the outer square
  double mouth_width = 0.1;
  double lip_depth = 0.12;
  double wall_thickness = 0.04;
  Point x_init{0.3, 0.5};
  Point goal_center{0.1, 0.5};
  double goal_radius = 0.05;

  void validate() const;
};

ProblemDef bug_trap_2d(const BugTrapSpec& spec);

enum class CostFieldKind { kHighCostBlock, kHigherCostBlock, kRadial };

/// Start (0.1, 0.5), goal ball at (0.9, 0.5), no obstacles. Block variants put
/// a field of 2 or 4 (base 1) on [0.4, 0.6] x [0.1, 0.9]; the radial variant
/// peaks at the center.
ProblemDef cost_field_demo(CostFieldKind kind);
Aabb cost_field_block();

struct CostFieldOracle {
  double through_cost;  // best path crossing both vertical faces of the block
  double detour_cost;   // best path around a block corner
  bool through_wins() const { return through_cost < detour_cost; }
};

/// Brute force over crossing heights (resolution^2 candidate paths) for the block demos.
CostFieldOracle cost_field_oracle(const ProblemDef& problem, int resolution = 1000);

/// Length of a polyline inside a closed box.
double length_inside(const std::vector<Point>& path, const Aabb& box);

struct ClutterSpec {
  int dim = 2;
  int count = 20;
  double coverage = 0.2;
  double max_extent = 0.3;  // per-axis side cap
  bool disjoint = true;
  enum class Visibility { kAny, kBlocked, kVisible };
  Visibility visibility = Visibility::kAny;
  double start_goal_clearance = 0.02;
  double goal_radius = 0.05;

  void validate() const;
};

/// Seeded random boxes with start near the origin corner and a ball goal near
/// the opposite corner.
ProblemDef random_clutter(const ClutterSpec& spec, std::uint64_t seed);

}  // namespace fmtstar
