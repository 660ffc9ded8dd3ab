#include <gtest/gtest.h>

#include <cmath>

#include "fmtstar/errors.hpp"
#include "fmtstar/sampling.hpp"

namespace fmtstar {
namespace {

const Point kStart{0.05, 0.05};

TEST(SampleFree, ReproducibleAndInCube) {
  const World w(2, {});
  const SampleSet a = sample_free(100, w, kStart, 17);
  const SampleSet b = sample_free(100, w, kStart, 17);
  ASSERT_EQ(a.size(), 101u);
  EXPECT_EQ(a.n(), 100u);
  EXPECT_EQ(a.points, b.points);
  EXPECT_EQ(a.points[0], kStart);
  for (const Point& p : a.points) {
    for (std::size_t i = 0; i < 2; ++i) {
      EXPECT_GE(p[i], 0.0);
      EXPECT_LE(p[i], 1.0);
    }
  }
  EXPECT_NE(sample_free(100, w, kStart, 18).points, a.points);
}

TEST(SampleFree, RejectsObstaclePoints) {
  const World w(2, {make_box(Point{0.4, 0.4}, Point{0.6, 0.6})});
  const SampleSet s = sample_free(1000, w, kStart, 1);
  for (const Point& p : s.points) EXPECT_TRUE(w.point_free(p));
}

TEST(SampleFree, ZeroSamplesKeepsStartOnly) {
  const SampleSet s = sample_free(0, World(2, {}), kStart, 1);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s.n(), 0u);
}

TEST(SampleFree, DegenerateWorldThrows) {
  const World w(2, {make_box(Point{0.0, 0.0}, Point{1.0, 0.99999}), make_box(Point{0.0, 0.99999}, Point{0.9999, 1.0})});
  EXPECT_THROW(sample_free(10, w, Point{0.99995, 0.999995}, 1), SpecError);
}

TEST(SampleFree, ChiSquareUniformity) {
  const SampleSet s = sample_free(100000, World(2, {}), kStart, 99);
  std::vector<int> bins(16, 0);
  for (std::size_t i = 1; i < s.size(); ++i) {
    const int bx = std::min(3, static_cast<int>(s.points[i][0] * 4));
    const int by = std::min(3, static_cast<int>(s.points[i][1] * 4));
    ++bins[bx * 4 + by];
  }
  double chi2 = 0.0;
  const double expected = 100000.0 / 16;
  for (int b : bins) chi2 += (b - expected) * (b - expected) / expected;
  EXPECT_LT(chi2, 37.697);  // chi-square critical value, 15 dof, p = 0.001
}

TEST(SampleDensity, UniformReducesToSampleFree) {
  const World w(2, {});
  const SampleSet s = sample_density(500, DensitySpec{}, w, kStart, 4);
  EXPECT_EQ(s.radius_multiplier, 1.0);
  EXPECT_EQ(s.points, sample_free(500, w, kStart, 4).points);
}

DensitySpec left_heavy() {
  DensitySpec spec;
  spec.kind = DensitySpec::Kind::kMixture;
  spec.uniform_weight = 0.5;
  spec.components = {{0.5, make_box(Point{0.0, 0.0}, Point{0.5, 1.0})}};
  spec.ell = 0.5;
  spec.envelope = 1.5;
  return spec;
}

TEST(SampleDensity, RadiusMultiplierFromLowerBound) {
  const SampleSet s = sample_density(10, left_heavy(), World(2, {}), kStart, 4);
  EXPECT_NEAR(s.radius_multiplier, std::sqrt(2.0), 1e-12);
}

TEST(SampleDensity, MixtureMass) {
  const SampleSet s = sample_density(100000, left_heavy(), World(2, {}), kStart, 5);
  int left = 0;
  for (std::size_t i = 1; i < s.size(); ++i) left += s.points[i][0] < 0.5;
  EXPECT_NEAR(left / 100000.0, 0.75, 0.01);
}

TEST(SampleDensity, EnvelopeViolationThrows) {
  DensitySpec spec = left_heavy();
  spec.envelope = 1.2;
  EXPECT_THROW(sample_density(100, spec, World(2, {}), kStart, 5), SpecError);
}

TEST(ValidateDensity, ChecksDeclaredBounds) {
  EXPECT_NO_THROW(validate_density(left_heavy(), World(2, {})));
  DensitySpec spec = left_heavy();
  spec.ell = 0.8;
  EXPECT_THROW(validate_density(spec, World(2, {})), SpecError);
}

TEST(SampleProblem, GoalSamplesAreFlaggedAndCounted) {
  ProblemDef p;
  p.world = World(2, {});
  p.x_init = kStart;
  p.goal = GoalRegion::ball(Point{0.9, 0.9}, 0.05);
  const SampleSet s = sample_problem(p, 50, 3, 8);
  EXPECT_EQ(s.n(), 50u);
  std::size_t flagged = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s.goal_sample[i]) {
      ++flagged;
      EXPECT_TRUE(p.goal.contains(s.points[i]));
    }
  }
  EXPECT_EQ(flagged, 3u);
}

}  // namespace
}  // namespace fmtstar
