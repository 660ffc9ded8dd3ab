#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "fmtstar/costs.hpp"
#include "fmtstar/errors.hpp"
#include "fmtstar/rng.hpp"

namespace fmtstar {
namespace {

Point random_point(Rng& rng, int d) {
  Point p(d);
  for (int i = 0; i < d; ++i) p[i] = rng.uniform();
  return p;
}

TEST(PairCost, EuclideanThreeFourFive) {
  EXPECT_NEAR(pair_cost(CostModel::euclidean(), Point{0.0, 0.0}, Point{0.6, 0.8}), 1.0, 1e-15);
}

TEST(PairCost, ConstantFieldScalesLength) {
  const auto m = CostModel::line_integral(ConstantField{2.0}, 2.0, 2.0);
  EXPECT_NEAR(m.pair_cost(Point{0.1, 0.1}, Point{0.4, 0.5}), 1.0, 1e-12);
}

TEST(PairCost, LinearFieldIntegral) {
  const auto m = CostModel::line_integral(AffineField{0.0, {1.0, 0.0}}, 0.0, 1.0);
  EXPECT_NEAR(m.pair_cost(Point{0.0, 0.0}, Point{1.0, 0.0}), 0.5, 1e-10);
  const auto g = CostModel::line_integral(AffineField{0.0, {1.0, 0.0}}, 0.0, 1.0, QuadratureRule::gauss(3));
  EXPECT_NEAR(g.pair_cost(Point{0.0, 0.0}, Point{1.0, 0.0}), 0.5, 1e-14);
}

TEST(PairCost, ZeroForCoincidentPoints) {
  const auto m = CostModel::line_integral(RadialField{Point{0.5, 0.5}, 1.0, 0.1, 0.05}, 1.0, 3.0);
  EXPECT_EQ(m.pair_cost(Point{0.3, 0.3}, Point{0.3, 0.3}), 0.0);
}

TEST(PairCost, SymmetricForFields) {
  const auto m = CostModel::line_integral(RadialField{Point{0.5, 0.5}, 1.0, 0.1, 0.05}, 1.0, 3.0);
  Rng rng(5, 0);
  for (int i = 0; i < 200; ++i) {
    const Point a = random_point(rng, 2), b = random_point(rng, 2);
    EXPECT_EQ(m.pair_cost(a, b), m.pair_cost(b, a));
  }
}

TEST(PairCost, BoxFieldSplitsAtBoundaries) {
  BoxRegionField f{1.0, {{make_box(Point{0.4, 0.0}, Point{0.6, 1.0}), 2.0}}};
  const auto m = CostModel::line_integral(f, 1.0, 2.0);
  // 0.3 at base, 0.2 inside at double cost, 0.2 at base.
  EXPECT_NEAR(m.pair_cost(Point{0.1, 0.5}, Point{0.8, 0.5}), 0.3 + 0.4 + 0.2, 1e-14);
}

TEST(PairCost, FieldOutsideDeclaredBoundsThrows) {
  const auto m = CostModel::line_integral(AffineField{0.0, {1.0, 0.0}}, 0.5, 1.0);
  EXPECT_THROW(m.pair_cost(Point{0.0, 0.0}, Point{1.0, 0.0}), ModelError);
}

TEST(PairCost, WeightedWrapsShorterArc) {
  const auto m = CostModel::weighted({1.0, 1.0}, {true, false});
  EXPECT_NEAR(m.pair_cost(Point{0.05, 0.5}, Point{0.95, 0.5}), 0.1, 1e-12);
  const Point mid = m.interpolate(Point{0.05, 0.5}, Point{0.95, 0.5}, 0.5);
  EXPECT_NEAR(std::min(mid[0], 1.0 - mid[0]), 0.0, 1e-12);  // 0 and 1 coincide
}

TEST(PairCost, TriangleInequalityOnRandomTriples) {
  const CostModel models[] = {CostModel::euclidean(), CostModel::weighted({2.0, 1.0, 0.5}),
                              CostModel::weighted({1.0, 3.0, 1.0}, {true, false, true})};
  Rng rng(9, 0);
  for (const auto& m : models) {
    for (int i = 0; i < 10000; ++i) {
      const Point a = random_point(rng, 3), b = random_point(rng, 3), c = random_point(rng, 3);
      ASSERT_LE(m.pair_cost(a, c), m.pair_cost(a, b) + m.pair_cost(b, c) + 1e-12);
    }
  }
}

TEST(PairCost, LineIntegralWithinFieldBounds) {
  const auto m = CostModel::line_integral(RadialField{Point{0.5, 0.5}, 1.0, 0.1, 0.05}, 1.0, 3.0);
  Rng rng(11, 0);
  for (int i = 0; i < 2000; ++i) {
    const Point a = random_point(rng, 2), b = random_point(rng, 2);
    const double len = distance(a, b);
    const double c = m.pair_cost(a, b);
    EXPECT_GE(c, len - 1e-12);
    EXPECT_LE(c, 3.0 * len + 1e-12);
  }
}

TEST(PairCost, SimpsonMatchesRiemannSum) {
  const RadialField field{Point{0.5, 0.5}, 1.0, 0.1, 0.05};
  const auto m = CostModel::line_integral(field, 1.0, 3.0);
  Rng rng(12, 0);
  for (int i = 0; i < 5; ++i) {
    const Point a = random_point(rng, 2), b = random_point(rng, 2);
    const int steps = 1000000;
    double sum = 0.0;
    for (int k = 0; k < steps; ++k) sum += evaluate(field, lerp(a, b, (k + 0.5) / steps));
    sum *= distance(a, b) / steps;
    EXPECT_NEAR(m.pair_cost(a, b) / sum, 1.0, 1e-6);
  }
}

TEST(MetricBallVolume, EuclideanAndWeighted) {
  EXPECT_NEAR(metric_ball_volume(CostModel::euclidean(), 2), std::numbers::pi, 1e-14);
  EXPECT_NEAR(metric_ball_volume(CostModel::weighted({2.0, 1.0}), 2), std::numbers::pi / 2, 1e-14);
  EXPECT_NEAR(metric_ball_volume(CostModel::weighted({1.0, 1.0, 1.0, 1.0}), 4), unit_ball_volume(4), 1e-14);
}

TEST(MetricBallVolume, MonteCarloAgreesWithClosedForm) {
  BallVolumeMethod mc{BallVolumeMethod::Kind::kMonteCarlo, 400000, 1};
  EXPECT_NEAR(metric_ball_volume(CostModel::weighted({2.0, 1.0, 1.5}), 3, mc), unit_ball_volume(3) / 3.0, 0.02);
}

TEST(MetricBallVolume, LineIntegralUnsupported) {
  EXPECT_THROW(metric_ball_volume(CostModel::line_integral(ConstantField{1.0}, 1.0, 1.0), 2), MethodError);
}

TEST(GaussLegendre, IntegratesPolynomialsExactly) {
  const auto [x, w] = gauss_legendre(4);
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * std::pow(x[i], 6);
  EXPECT_NEAR(s, 2.0 / 7.0, 1e-14);
}

}  // namespace
}  // namespace fmtstar
