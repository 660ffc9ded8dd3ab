#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "fmtstar/problem.hpp"

namespace fmtstar {

/// The vertex set V: index 0 is x_init, every other point is in X_free.
struct SampleSet {
  std::vector<Point> points;
  std::vector<bool> goal_sample;  // true for points drawn from the goal region
  std::uint64_t seed = 0;
  /// (1/ell)^(1/d) for non-uniform densities, 1 otherwise.
  double radius_multiplier = 1.0;

  std::size_t n() const { return points.empty() ? 0 : points.size() - 1; }
  std::size_t size() const { return points.size(); }
};

/// Proposals tried before the acceptance rate is judged.
inline constexpr std::uint64_t kRejectionWindow = 1000000;
inline constexpr double kMinAcceptance = 1e-4;

/// n i.i.d. uniform points on X_free by rejection from the unit cube.
SampleSet sample_free(std::size_t n, const World& world, PointView x_init, std::uint64_t seed);

/// n i.i.d. points from `spec` by rejection against its envelope. The set's
/// radius_multiplier is (1/ell)^(1/d).
SampleSet sample_density(std::size_t n, const DensitySpec& spec, const World& world, PointView x_init,
                         std::uint64_t seed);

/// Relative density (times mu_free) of `spec` at x; 0 outside X_free.
double relative_density(const DensitySpec& spec, const World& world, PointView x);

/// Checks weights, declared ell/envelope against the density, and that it
/// integrates to 1 within 1% by monte-carlo. Throws SpecError.
void validate_density(const DensitySpec& spec, const World& world, std::uint64_t samples = 200000);

/// Appends `count` uniform points of goal intersect X_free, flagged as goal samples.
void append_goal_samples(SampleSet& set, const GoalRegion& goal, const World& world, std::size_t count,
                         std::uint64_t seed);

/// The vertex set a planner sees for `problem`: n points in total, of which
/// min(goal_samples, n) come from the goal region and the rest from the
/// problem's density.
SampleSet sample_problem(const ProblemDef& problem, std::size_t n, std::size_t goal_samples, std::uint64_t seed);

}  // namespace fmtstar
