#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace fmtstar {

using PointView = std::span<const double>;

/// A configuration in the unit cube [0,1]^d.
class Point {
 public:
  Point() = default;
  explicit Point(std::size_t dim, double fill = 0.0) : coords_(dim, fill) {}
  Point(std::initializer_list<double> values) : coords_(values) {}
  explicit Point(std::vector<double> values) : coords_(std::move(values)) {}
  explicit Point(PointView values) : coords_(values.begin(), values.end()) {}

  std::size_t dim() const { return coords_.size(); }
  double operator[](std::size_t i) const { return coords_[i]; }
  double& operator[](std::size_t i) { return coords_[i]; }

  PointView view() const { return coords_; }
  operator PointView() const { return coords_; }  // NOLINT(google-explicit-constructor)

  const std::vector<double>& values() const { return coords_; }

  friend bool operator==(const Point&, const Point&) = default;

 private:
  std::vector<double> coords_;
};

double distance(PointView a, PointView b);
double squared_distance(PointView a, PointView b);

/// Point on the segment a + t (b - a).
Point lerp(PointView a, PointView b, double t);

/// Closed axis-aligned box.
struct Aabb {
  Point lo;
  Point hi;

  std::size_t dim() const { return lo.dim(); }
  double volume() const;
  /// Closed-set membership.
  bool contains(PointView x) const;
  /// Euclidean distance from x to the box (0 when inside).
  double distance_to(PointView x) const;
  /// Lebesgue measure of the intersection with another box.
  double overlap_volume(const Aabb& other) const;

  friend bool operator==(const Aabb&, const Aabb&) = default;
};

/// Validates lo <= hi per axis and matching dimensions; throws InputError.
Aabb make_box(Point lo, Point hi);

struct MeasureMethod {
  enum class Kind { kExactDisjoint, kGrid, kMonteCarlo };
  Kind kind = Kind::kExactDisjoint;
  int resolution = 1024;           // grid cells per axis
  std::uint64_t samples = 1000000; // monte-carlo draws
  std::uint64_t seed = 0;

  static MeasureMethod exact() { return {}; }
  static MeasureMethod grid(int resolution) { return {Kind::kGrid, resolution, 0, 0}; }
  static MeasureMethod monte_carlo(std::uint64_t samples, std::uint64_t seed) {
    return {Kind::kMonteCarlo, 0, samples, seed};
  }
};

/// The collision black box: dimension, closed box obstacles inside the unit
/// cube, and the cached free-space measure. Immutable once built.
class World {
 public:
  World() = default;
  /// Computes mu_free exactly when the obstacles are interior-disjoint and by
  /// a grid/monte-carlo estimate otherwise.
  World(int dim, std::vector<Aabb> obstacles);

  int dim() const { return dim_; }
  const std::vector<Aabb>& obstacles() const { return obstacles_; }
  double mu_free() const { return mu_free_; }

  /// Copy of this world with mu_free replaced by `method`'s estimate.
  World with_measure(const MeasureMethod& method) const;

  /// True when x is inside the cube and outside every (closed) obstacle.
  bool point_free(PointView x) const;

 private:
  int dim_ = 0;
  std::vector<Aabb> obstacles_;
  double mu_free_ = 1.0;
};

/// Volume of the d-dimensional unit ball, pi^(d/2) / Gamma(d/2 + 1).
double unit_ball_volume(int d);

/// True iff the closed segment pq misses every closed obstacle.
bool segment_collision_free(PointView p, PointView q, const World& world);

/// Distance from x to the nearest obstacle point; the cube boundary counts as
/// obstacle when `boundary_is_obstacle` is set.
double clearance(PointView x, const World& world, bool boundary_is_obstacle = true);

bool obstacles_disjoint(const std::vector<Aabb>& obstacles);

double free_space_measure(const World& world, const MeasureMethod& method);

/// Minkowski-grows every obstacle by `half_extents` and clips to the cube.
World inflate_obstacles(const World& world, PointView half_extents);

}  // namespace fmtstar
