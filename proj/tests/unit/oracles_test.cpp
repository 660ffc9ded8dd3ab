#include <gtest/gtest.h>

#include <cmath>

#include "fmtstar/errors.hpp"
#include "fmtstar/oracles.hpp"
#include "fmtstar/planners.hpp"
#include "fmtstar/rng.hpp"

namespace fmtstar {
namespace {

ProblemDef corner_to_corner(std::vector<Aabb> boxes = {}) {
  ProblemDef p;
  p.world = World(2, std::move(boxes));
  p.x_init = Point{0.001, 0.001};
  p.goal = GoalRegion::ball(Point{0.999, 0.999}, 0.001);
  return p;
}

TEST(GridDijkstra, OctileBoundOnEmptySquare) {
  GridSpec g;
  g.resolution = 256;
  const GridResult r = grid_dijkstra(corner_to_corner(), g);
  ASSERT_TRUE(r.feasible);
  EXPECT_NEAR(r.cost, std::sqrt(2.0), 0.09);
}

TEST(GridDijkstra, BlockedGoalIsInfeasible) {
  ProblemDef p = corner_to_corner({make_box(Point{0.9, 0.9}, Point{1.0, 1.0})});
  p.goal = GoalRegion::ball(Point{0.95, 0.95}, 0.01);
  EXPECT_FALSE(grid_dijkstra(p, GridSpec{}).feasible);
}

TEST(GridDijkstra, WiderGapIsCheaper) {
  double previous = std::numeric_limits<double>::infinity();
  for (double gap : {0.1, 0.2, 0.4}) {
    const ProblemDef p = corner_to_corner({make_box(Point{0.45, 0.0}, Point{0.55, 1.0 - gap})});
    GridSpec g;
    g.resolution = 128;
    const GridResult r = grid_dijkstra(p, g);
    ASSERT_TRUE(r.feasible);
    EXPECT_LT(r.cost, previous);
    previous = r.cost;
  }
}

TEST(GridDijkstra, NeverBelowKnownOptimum) {
  // Detour around one wall: the optimum bends at the wall's top corner.
  const ProblemDef p = corner_to_corner({make_box(Point{0.45, 0.0}, Point{0.55, 0.7})});
  const double optimum = std::hypot(0.449, 0.699) + 0.1 + std::hypot(0.449, 0.299) - 0.001;
  for (auto conn : {GridSpec::Connectivity::kAxis, GridSpec::Connectivity::kFullDiagonal}) {
    GridSpec g;
    g.resolution = 128;
    g.connectivity = conn;
    const GridResult r = grid_dijkstra(p, g);
    ASSERT_TRUE(r.feasible);
    EXPECT_GE(r.cost, optimum - 2.0 * std::sqrt(2.0) / 128);
  }
}

TEST(GridDijkstra, RejectsCoarseOrUnsupportedGrids) {
  GridSpec g;
  g.resolution = 8;
  EXPECT_THROW(grid_dijkstra(corner_to_corner(), g), InputError);
  ProblemDef p4;
  p4.world = World(4, {});
  p4.x_init = Point(4, 0.1);
  p4.goal = GoalRegion::ball(Point(4, 0.9), 0.05);
  g.resolution = 16;
  EXPECT_THROW(grid_dijkstra(p4, g), InputError);
  g.connectivity = GridSpec::Connectivity::kAxis;
  EXPECT_TRUE(grid_dijkstra(p4, g).feasible);
}

TEST(Exhaustive, TrivialInstances) {
  ProblemDef p = corner_to_corner();
  p.x_init = Point{0.1, 0.5};
  p.goal = GoalRegion::ball(Point{0.4, 0.5}, 0.01);
  SampleSet s;
  s.points = {p.x_init, Point{0.4, 0.5}};
  s.goal_sample = {false, true};
  EXPECT_NEAR(exhaustive_shortest_path(s, 0.5, p), 0.3, 1e-15);
  EXPECT_TRUE(std::isinf(exhaustive_shortest_path(s, 0.2, p)));
}

TEST(Exhaustive, MatchesDijkstraOnRandomInstances) {
  ProblemDef p = corner_to_corner({make_box(Point{0.4, 0.2}, Point{0.6, 0.8})});
  p.x_init = Point{0.1, 0.5};
  p.goal = GoalRegion::ball(Point{0.9, 0.5}, 0.1);
  int connected = 0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const std::size_t n = seed % 2 ? 20 : 10;
    const SampleSet s = sample_problem(p, n, 1, seed);
    const double r = 0.45;
    const double brute = exhaustive_shortest_path(s, r, p);
    const PlanResult dj = disk_graph_shortest_path(p, s, r, true);
    if (std::isinf(brute)) {
      EXPECT_FALSE(dj.success) << seed;
    } else {
      ++connected;
      ASSERT_TRUE(dj.success) << seed;
      EXPECT_NEAR(dj.cost, brute, 1e-12) << seed;
    }
  }
  EXPECT_GT(connected, 10);
}

TEST(Exhaustive, RejectsLargeInstances) {
  ProblemDef p = corner_to_corner();
  const SampleSet s = sample_problem(p, 21, 1, 0);
  EXPECT_THROW(exhaustive_shortest_path(s, 0.3, p), InputError);
}

PlannerConfig fixed_radius(double r) {
  PlannerConfig c;
  c.radius_override = r;
  c.keep_tree = true;
  return c;
}

TEST(LazyTrap, InstanceSatisfiesAllFourConditions) {
  const LazyTrapInstance inst = lazy_trap_instance();
  const LazyTrapConditions c = lazy_trap_conditions(inst);
  EXPECT_TRUE(c.within_radius);
  EXPECT_TRUE(c.u2_costlier);
  EXPECT_TRUE(c.u2_cheaper_free);
  EXPECT_TRUE(c.u2_blocked);
  EXPECT_GE(distance(inst.samples.points[0], inst.samples.points[3]), inst.r);
}

TEST(LazyTrap, LazyConnectionIsSuboptimal) {
  const LazyTrapInstance inst = lazy_trap_instance();
  const PlanResult fmt = fmt_plan(inst.problem, inst.samples, fixed_radius(inst.r));
  const PlanResult graph = disk_graph_shortest_path(inst.problem, inst.samples, inst.r, true, true);
  ASSERT_TRUE(graph.success);
  EXPECT_GT(fmt.tree->cost_to_arrive[LazyTrapInstance::kX], graph.tree->cost_to_arrive[LazyTrapInstance::kX]);
}

TEST(LazyTrap, EachNegationRestoresOptimality) {
  const struct {
    LazyTrapVariant variant;
    bool LazyTrapConditions::*broken;
    std::uint32_t parent;
  } cases[] = {
      {LazyTrapVariant::kNoObstacle, &LazyTrapConditions::u2_blocked, LazyTrapInstance::kU2},
      {LazyTrapVariant::kU2First, &LazyTrapConditions::u2_costlier, LazyTrapInstance::kU1},
      {LazyTrapVariant::kU1Cheaper, &LazyTrapConditions::u2_cheaper_free, LazyTrapInstance::kU1},
  };
  for (const auto& tc : cases) {
    const LazyTrapInstance inst = lazy_trap_instance(tc.variant);
    const LazyTrapConditions c = lazy_trap_conditions(inst);
    EXPECT_FALSE(c.*tc.broken);
    int holding = c.within_radius + c.u2_costlier + c.u2_cheaper_free + c.u2_blocked;
    EXPECT_EQ(holding, 3);
    const PlanResult fmt = fmt_plan(inst.problem, inst.samples, fixed_radius(inst.r));
    const PlanResult graph = disk_graph_shortest_path(inst.problem, inst.samples, inst.r, true, true);
    ASSERT_TRUE(fmt.success);
    EXPECT_NEAR(fmt.cost, graph.cost, 1e-12);
    EXPECT_EQ(fmt.tree->parent[LazyTrapInstance::kX], tc.parent);
  }
}

}  // namespace
}  // namespace fmtstar
