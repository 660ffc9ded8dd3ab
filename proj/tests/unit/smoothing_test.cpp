#include <gtest/gtest.h>

#include "fmtstar/environments.hpp"
#include "fmtstar/errors.hpp"
#include "fmtstar/planners.hpp"
#include "fmtstar/smoothing.hpp"

namespace fmtstar {
namespace {

TEST(AdaptiveShortcut, StraightPathUnchanged) {
  const std::vector<Point> path{Point{0.1, 0.1}, Point{0.9, 0.4}};
  const SmoothResult r = adaptive_shortcut(path, World(2, {}), CostModel::euclidean(), SmoothParams{});
  EXPECT_EQ(r.path, path);
  EXPECT_DOUBLE_EQ(r.cost, distance(path[0], path[1]));
}

TEST(AdaptiveShortcut, ZigzagBecomesStraight) {
  const std::vector<Point> path{Point{0.0, 0.0}, Point{0.5, 0.4}, Point{1.0, 0.0}};
  const SmoothResult r = adaptive_shortcut(path, World(2, {}), CostModel::euclidean(), SmoothParams{});
  EXPECT_NEAR(r.cost, 1.0, 1e-3);
  EXPECT_EQ(r.path.front(), path.front());
  EXPECT_EQ(r.path.back(), path.back());
}

TEST(AdaptiveShortcut, MonotoneFeasibleAndDeterministic) {
  const World w(2, {make_box(Point{0.3, 0.0}, Point{0.4, 0.7}), make_box(Point{0.6, 0.3}, Point{0.7, 1.0})});
  ProblemDef p;
  p.world = w;
  p.x_init = Point{0.1, 0.1};
  p.goal = GoalRegion::ball(Point{0.9, 0.9}, 0.05);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const PlanResult plan = fmt_plan(p, sample_problem(p, 500, 1, seed), PlannerConfig{});
    ASSERT_TRUE(plan.success);
    SmoothParams params;
    params.seed = seed;
    const SmoothResult r = adaptive_shortcut(plan.path, w, p.cost, params);
    EXPECT_LE(r.cost, plan.cost + 1e-12);
    EXPECT_EQ(r.path.front(), plan.path.front());
    EXPECT_EQ(r.path.back(), plan.path.back());
    for (std::size_t i = 0; i + 1 < r.path.size(); ++i) EXPECT_TRUE(segment_collision_free(r.path[i], r.path[i + 1], w));
    for (std::size_t i = 1; i < r.cost_trace.size(); ++i) EXPECT_LE(r.cost_trace[i], r.cost_trace[i - 1]);
    EXPECT_NEAR(path_cost(p.cost, r.path), r.cost, 1e-9);
    EXPECT_EQ(adaptive_shortcut(plan.path, w, p.cost, params).path, r.path);
    EXPECT_GT(r.collision_checks, 0u);
  }
}

TEST(AdaptiveShortcut, RepeatedSegmentsCountedOnce) {
  const std::vector<Point> path{Point{0.1, 0.1}, Point{0.9, 0.4}};
  EXPECT_EQ(adaptive_shortcut(path, World(2, {}), CostModel::euclidean(), SmoothParams{}).collision_checks, 1u);
}

TEST(AdaptiveShortcut, SingleAxisPassHelpsInMaze) {
  MazeSpec spec;
  spec.dim = 4;
  const ProblemDef p = recursive_maze(spec);
  const PlanResult plan = fmt_plan(p, sample_problem(p, 2000, 1, 3), PlannerConfig{});
  ASSERT_TRUE(plan.success);
  SmoothParams without;
  without.partial_attempts_per_vertex = 0.0;
  SmoothParams with = without;
  with.partial_attempts_per_vertex = 1.0;
  const SmoothResult a = adaptive_shortcut(plan.path, p.world, p.cost, without);
  const SmoothResult b = adaptive_shortcut(plan.path, p.world, p.cost, with);
  EXPECT_LT(b.cost, a.cost);
  EXPECT_GE(b.cost, maze_optimal_cost(spec));
  for (std::size_t i = 0; i + 1 < b.path.size(); ++i) EXPECT_TRUE(segment_collision_free(b.path[i], b.path[i + 1], p.world));
}

TEST(AdaptiveShortcut, CollidingInputThrows) {
  const World w(2, {make_box(Point{0.4, 0.4}, Point{0.6, 0.6})});
  EXPECT_THROW(adaptive_shortcut({Point{0.1, 0.1}, Point{0.9, 0.9}}, w, CostModel::euclidean(), SmoothParams{}),
               InputError);
}

TEST(SmoothParams, Validation) {
  SmoothParams p;
  p.stall_rounds = 0;
  EXPECT_THROW(p.validate(), SpecError);
  p.stall_rounds = 40;
  EXPECT_THROW(p.validate(), SpecError);
  p = SmoothParams{};
  p.partial_attempts_per_vertex = -1.0;
  EXPECT_THROW(p.validate(), SpecError);
}

}  // namespace
}  // namespace fmtstar
