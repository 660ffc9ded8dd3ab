#include <gtest/gtest.h>

#include <cmath>

#include "fmtstar/environments.hpp"
#include "fmtstar/errors.hpp"
#include "fmtstar/oracles.hpp"
#include "fmtstar/planners.hpp"
#include "fmtstar/smoothing.hpp"

namespace fmtstar {
namespace {

void expect_disjoint_in_cube(const World& w) {
  EXPECT_TRUE(obstacles_disjoint(w.obstacles()));
  for (const Aabb& b : w.obstacles()) {
    for (std::size_t i = 0; i < b.dim(); ++i) {
      EXPECT_GE(b.lo[i], 0.0);
      EXPECT_LE(b.hi[i], 1.0);
    }
  }
}

MazeSpec maze(int d) {
  MazeSpec s;
  s.dim = d;
  return s;
}

// Optimal maze lengths under the default parameters, from the gate-chain
// program; regenerated whenever the construction changes.
constexpr double kMazeOptimum[] = {0.0, 0.0, 1.795023450, 3.472146001, 6.782016582, 13.379242175, 26.562316124,
                                   52.922740526};

TEST(RecursiveMaze, StructureAcrossDimensions) {
  const std::size_t gates[] = {0, 0, 4, 10, 22, 46, 94, 190};
  for (int d = 2; d <= 7; ++d) {
    const MazeLayout m = build_maze(maze(d));
    expect_disjoint_in_cube(m.problem.world);
    EXPECT_EQ(m.gates.size(), gates[d]);
    EXPECT_TRUE(m.problem.world.point_free(m.problem.x_init));
    EXPECT_TRUE(m.problem.world.point_free(m.problem.goal.center));
    EXPECT_TRUE(m.start_region.contains(m.problem.x_init));
    EXPECT_TRUE(m.terminal_region.contains(m.problem.goal.center));
    for (std::size_t g = 0; g + 1 < m.gates.size(); ++g) EXPECT_EQ(m.gates[g].overlap_volume(m.gates[g + 1]), 0.0);
    EXPECT_EQ(m.problem.provenance["generator"], "recursive_maze");
  }
}

TEST(RecursiveMaze, OptimalCostsAreFrozen) {
  for (int d = 2; d <= 7; ++d) EXPECT_NEAR(maze_optimal_cost(maze(d)), kMazeOptimum[d], 1e-6) << d;
  EXPECT_GE(kMazeOptimum[7], 40.0);
}

TEST(RecursiveMaze, TwoDimensionalGridCrossCheck) {
  const ProblemDef p = recursive_maze(maze(2));
  GridSpec g;
  g.resolution = 256;
  const GridResult r = grid_dijkstra(p, g);
  ASSERT_TRUE(r.feasible);
  // The grid ends at a cell center inside the goal; the optimum ends on its boundary.
  EXPECT_GE(r.cost, kMazeOptimum[2]);
  EXPECT_LE(r.cost, 1.082 * kMazeOptimum[2] + 0.05 + 2.0 / 256);
}

TEST(RecursiveMaze, ThreeDimensionalGridCrossCheck) {
  const ProblemDef p = recursive_maze(maze(3));
  GridSpec g;
  g.resolution = 64;
  const GridResult r = grid_dijkstra(p, g);
  ASSERT_TRUE(r.feasible);
  EXPECT_GE(r.cost, kMazeOptimum[3]);
  // Pull the grid path taut; the result is a feasible continuous path.
  const SmoothResult taut = adaptive_shortcut(r.path, p.world, p.cost, SmoothParams{});
  EXPECT_GE(taut.cost, kMazeOptimum[3] - 0.05 - 1e-9);
  EXPECT_LE(taut.cost, 1.05 * kMazeOptimum[3]);
}

TEST(RecursiveMaze, SmoothedPlansNeverBeatTheOptimum) {
  // Tightly smoothed feasible paths come close to the optimum from above.
  SmoothParams sp;
  sp.partial_attempts_per_vertex = 1.0;
  sp.max_rounds = 60;
  for (int d = 3; d <= 5; ++d) {
    const ProblemDef p = recursive_maze(maze(d));
    const PlanResult r = fmt_plan(p, sample_problem(p, 3000, 1, 5), PlannerConfig{});
    ASSERT_TRUE(r.success) << d;
    const SmoothResult s = adaptive_shortcut(r.path, p.world, p.cost, sp);
    EXPECT_GE(s.cost, kMazeOptimum[d]) << d;
    EXPECT_LE(s.cost, 1.06 * kMazeOptimum[d]) << d;
  }
}

TEST(RecursiveMaze, PathCrossesWallBandsOnlyThroughGaps) {
  // Both walls span from one side of the square, so every route crosses the
  // lower wall band in the right gap and the upper band in the left gap.
  const ProblemDef p = recursive_maze(maze(2));
  GridSpec g;
  g.resolution = 128;
  const GridResult r = grid_dijkstra(p, g);
  ASSERT_TRUE(r.feasible);
  const double c = (1.0 - 0.2) / 3.0;
  int lower = 0, upper = 0;
  for (std::size_t i = 0; i + 1 < r.path.size(); ++i) {
    for (int k = 0; k <= 16; ++k) {
      const Point x = lerp(r.path[i], r.path[i + 1], k / 16.0);
      if (x[1] >= c && x[1] <= c + 0.1) {
        ++lower;
        EXPECT_GT(x[0], 0.7);
      }
      if (x[1] >= 2 * c + 0.1 && x[1] <= 2 * c + 0.2) {
        ++upper;
        EXPECT_LT(x[0], 0.3);
      }
    }
  }
  EXPECT_GT(lower, 0);
  EXPECT_GT(upper, 0);
}

TEST(RecursiveMaze, RejectsThickWalls) {
  MazeSpec s;
  s.wall_thickness = 0.3;
  EXPECT_THROW(recursive_maze(s), SpecError);
}

TEST(GateChain, StraightLineThroughOpenGate) {
  const std::vector<Aabb> gates{make_box(Point{0.4, 0.0}, Point{0.4, 1.0})};
  EXPECT_NEAR(gate_chain_length(Point{0.1, 0.5}, gates, Point{0.9, 0.5}, 0.1), 0.7, 1e-9);
  const std::vector<Aabb> high{make_box(Point{0.5, 0.8}, Point{0.5, 1.0})};
  EXPECT_NEAR(gate_chain_length(Point{0.1, 0.5}, high, Point{0.9, 0.5}, 0.1),
              2.0 * std::hypot(0.4, 0.3) - 0.1, 1e-6);
}

TEST(BugTrap, DefaultIsFeasibleWithOneExit) {
  const ProblemDef p = bug_trap_2d(BugTrapSpec{});
  expect_disjoint_in_cube(p.world);
  GridSpec g;
  g.resolution = 512;
  const GridResult r = grid_dijkstra(p, g);
  ASSERT_TRUE(r.feasible);
  // The start is inside the cavity and the straight line is blocked.
  EXPECT_FALSE(segment_collision_free(p.x_init, p.goal.center, p.world));
  bool through_mouth = false;
  for (const Point& x : r.path) through_mouth |= (x[0] > 0.76 && x[0] < 0.8 && std::abs(x[1] - 0.5) < 0.05);
  EXPECT_TRUE(through_mouth);
}

TEST(BugTrap, ClosedMouthRefused) {
  BugTrapSpec s;
  s.mouth_width = 0.0;
  EXPECT_THROW(bug_trap_2d(s), SpecError);
}

TEST(BugTrap, GoalInsideCavityIsShort) {
  BugTrapSpec s;
  s.goal_center = Point{0.4, 0.5};
  const ProblemDef p = bug_trap_2d(s);
  const PlanResult r = fmt_plan(p, sample_problem(p, 500, 1, 1), PlannerConfig{});
  ASSERT_TRUE(r.success);
  EXPECT_LT(r.cost, 2.0 * (0.3 - 0.04));
}

TEST(CostFieldDemo, OracleWinners) {
  const CostFieldOracle two = cost_field_oracle(cost_field_demo(CostFieldKind::kHighCostBlock));
  const CostFieldOracle four = cost_field_oracle(cost_field_demo(CostFieldKind::kHigherCostBlock));
  EXPECT_TRUE(two.through_wins());
  EXPECT_FALSE(four.through_wins());
  // Straight through: 0.3 + 0.2 * 2 + 0.3 - 0.05; around: via the block corners.
  EXPECT_NEAR(two.through_cost, 0.95, 1e-6);
  const double around = 2.0 * std::hypot(0.3, 0.4) + 0.2 - 0.05;
  EXPECT_NEAR(two.detour_cost, around, 1e-6);
  EXPECT_NEAR(four.detour_cost, around, 1e-6);
}

TEST(CostFieldDemo, RadialFieldPeaksAtCenter) {
  const ProblemDef p = cost_field_demo(CostFieldKind::kRadial);
  EXPECT_GT(evaluate(p.cost.field(), Point{0.5, 0.5}), evaluate(p.cost.field(), Point{0.2, 0.5}));
  EXPECT_NO_THROW(p.validate());
}

TEST(CostFieldDemo, ConstantFieldReducesToEuclidean) {
  ProblemDef p = cost_field_demo(CostFieldKind::kHighCostBlock);
  const SampleSet s = sample_problem(p, 300, 1, 2);
  ProblemDef q = p;
  p.cost = CostModel::line_integral(ConstantField{1.0}, 1.0, 1.0);
  q.cost = CostModel::euclidean();
  EXPECT_NEAR(fmt_plan(p, s, PlannerConfig{}).cost, fmt_plan(q, s, PlannerConfig{}).cost, 1e-12);
}

TEST(LengthInside, ClipsSegments) {
  const Aabb box = cost_field_block();
  EXPECT_NEAR(length_inside({Point{0.1, 0.5}, Point{0.9, 0.5}}, box), 0.2, 1e-15);
  EXPECT_EQ(length_inside({Point{0.1, 0.95}, Point{0.9, 0.95}}, box), 0.0);
}

TEST(RandomClutter, EmptyWhenNoCoverage) {
  ClutterSpec s;
  s.coverage = 0.0;
  EXPECT_TRUE(random_clutter(s, 1).world.obstacles().empty());
}

TEST(RandomClutter, SameSeedSameWorld) {
  ClutterSpec s;
  EXPECT_EQ(random_clutter(s, 4).world.obstacles(), random_clutter(s, 4).world.obstacles());
  EXPECT_NE(random_clutter(s, 4).world.obstacles(), random_clutter(s, 5).world.obstacles());
}

TEST(RandomClutter, CoverageMatchesTarget) {
  ClutterSpec s;
  s.count = 50;
  s.coverage = 0.3;
  const ProblemDef p = random_clutter(s, 11);
  expect_disjoint_in_cube(p.world);
  const double covered = 1.0 - free_space_measure(p.world, MeasureMethod::grid(1024));
  EXPECT_GE(covered, 0.27);
  EXPECT_LE(covered, 0.33);
}

TEST(RandomClutter, VisibilityFlag) {
  ClutterSpec s;
  s.count = 30;
  s.coverage = 0.3;
  s.visibility = ClutterSpec::Visibility::kBlocked;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const ProblemDef p = random_clutter(s, seed);
    EXPECT_FALSE(segment_collision_free(p.x_init, p.goal.center, p.world));
  }
  s.visibility = ClutterSpec::Visibility::kVisible;
  const ProblemDef v = random_clutter(s, 0);
  EXPECT_TRUE(segment_collision_free(v.x_init, v.goal.center, v.world));
}

TEST(RandomClutter, ImpossiblePackingFails) {
  ClutterSpec s;
  s.count = 1;
  s.coverage = 0.95;
  s.max_extent = 1.0;
  EXPECT_THROW(random_clutter(s, 0), SpecError);
}

}  // namespace
}  // namespace fmtstar
