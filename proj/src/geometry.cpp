#include "fmtstar/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "fmtstar/errors.hpp"
#include "fmtstar/rng.hpp"

namespace fmtstar {

namespace {

constexpr double kSlabTolerance = 1e-12;

// Largest grid resolution per axis that keeps the cell count under ~4M.
int default_grid_resolution(int dim) {
  return std::max(16, static_cast<int>(std::floor(std::pow(4.0e6, 1.0 / dim))));
}

MeasureMethod default_measure(int dim, const std::vector<Aabb>& obstacles) {
  if (obstacles_disjoint(obstacles)) return MeasureMethod::exact();
  if (dim <= 3) return MeasureMethod::grid(default_grid_resolution(dim));
  return MeasureMethod::monte_carlo(2000000, 0);
}

bool in_any(PointView x, const std::vector<Aabb>& boxes) {
  return std::any_of(boxes.begin(), boxes.end(), [&](const Aabb& b) { return b.contains(x); });
}

}  // namespace

double squared_distance(PointView a, PointView b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

double distance(PointView a, PointView b) { return std::sqrt(squared_distance(a, b)); }

Point lerp(PointView a, PointView b, double t) {
  Point out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + t * (b[i] - a[i]);
  return out;
}

double Aabb::volume() const {
  double v = 1.0;
  for (std::size_t i = 0; i < lo.dim(); ++i) v *= hi[i] - lo[i];
  return v;
}

bool Aabb::contains(PointView x) const {
  for (std::size_t i = 0; i < lo.dim(); ++i) {
    if (x[i] < lo[i] || x[i] > hi[i]) return false;
  }
  return true;
}

double Aabb::distance_to(PointView x) const {
  double s = 0.0;
  for (std::size_t i = 0; i < lo.dim(); ++i) {
    double gap = 0.0;
    if (x[i] < lo[i]) gap = lo[i] - x[i];
    else if (x[i] > hi[i]) gap = x[i] - hi[i];
    s += gap * gap;
  }
  return std::sqrt(s);
}

double Aabb::overlap_volume(const Aabb& other) const {
  double v = 1.0;
  for (std::size_t i = 0; i < lo.dim(); ++i) {
    const double w = std::min(hi[i], other.hi[i]) - std::max(lo[i], other.lo[i]);
    if (w <= 0.0) return 0.0;
    v *= w;
  }
  return v;
}

Aabb make_box(Point lo, Point hi) {
  if (lo.dim() != hi.dim() || lo.dim() == 0) {
    throw InputError("box corners must have equal, nonzero dimension");
  }
  for (std::size_t i = 0; i < lo.dim(); ++i) {
    if (!std::isfinite(lo[i]) || !std::isfinite(hi[i])) throw InputError("box corner not finite");
    if (lo[i] > hi[i]) throw InputError("box min corner exceeds max corner on axis " + std::to_string(i));
  }
  return Aabb{std::move(lo), std::move(hi)};
}

bool obstacles_disjoint(const std::vector<Aabb>& obstacles) {
  for (std::size_t i = 0; i < obstacles.size(); ++i) {
    for (std::size_t j = i + 1; j < obstacles.size(); ++j) {
      if (obstacles[i].overlap_volume(obstacles[j]) > 0.0) return false;
    }
  }
  return true;
}

World::World(int dim, std::vector<Aabb> obstacles) : dim_(dim), obstacles_(std::move(obstacles)) {
  if (dim < 1) throw InputError("world dimension must be positive");
  for (const Aabb& b : obstacles_) {
    if (static_cast<int>(b.dim()) != dim) throw InputError("obstacle dimension mismatch");
    for (int i = 0; i < dim; ++i) {
      if (b.lo[i] > b.hi[i]) throw InputError("obstacle has min > max");
      if (b.lo[i] < 0.0 || b.hi[i] > 1.0) throw InputError("obstacle leaves the unit cube");
    }
  }
  mu_free_ = free_space_measure(*this, default_measure(dim, obstacles_));
}

World World::with_measure(const MeasureMethod& method) const {
  World copy = *this;
  copy.mu_free_ = free_space_measure(*this, method);
  return copy;
}

bool World::point_free(PointView x) const {
  for (int i = 0; i < dim_; ++i) {
    if (x[i] < 0.0 || x[i] > 1.0) return false;
  }
  return !in_any(x, obstacles_);
}

double unit_ball_volume(int d) {
  const double half = 0.5 * d;
  return std::pow(std::numbers::pi, half) / std::tgamma(half + 1.0);
}

bool segment_collision_free(PointView p, PointView q, const World& world) {
  const std::size_t d = static_cast<std::size_t>(world.dim());
  if (p.size() != d || q.size() != d) throw InputError("segment endpoint dimension mismatch");
  for (const Aabb& box : world.obstacles()) {
    double t0 = 0.0;
    double t1 = 1.0;
    bool separated = false;
    for (std::size_t i = 0; i < d && !separated; ++i) {
      const double dir = q[i] - p[i];
      if (dir == 0.0) {
        separated = p[i] < box.lo[i] || p[i] > box.hi[i];
        continue;
      }
      double ta = (box.lo[i] - p[i]) / dir;
      double tb = (box.hi[i] - p[i]) / dir;
      if (ta > tb) std::swap(ta, tb);
      t0 = std::max(t0, ta);
      t1 = std::min(t1, tb);
      separated = t0 > t1 + kSlabTolerance;
    }
    if (!separated) return false;
  }
  return true;
}

double clearance(PointView x, const World& world, bool boundary_is_obstacle) {
  double best = std::numeric_limits<double>::infinity();
  for (const Aabb& box : world.obstacles()) best = std::min(best, box.distance_to(x));
  if (boundary_is_obstacle) {
    for (double c : x) best = std::min({best, std::max(c, 0.0), std::max(1.0 - c, 0.0)});
  }
  return best;
}

double free_space_measure(const World& world, const MeasureMethod& method) {
  const auto& obstacles = world.obstacles();
  const int d = world.dim();
  switch (method.kind) {
    case MeasureMethod::Kind::kExactDisjoint: {
      if (!obstacles_disjoint(obstacles)) {
        throw MethodError("exact-disjoint measure requires pairwise-disjoint obstacles");
      }
      double covered = 0.0;
      for (const Aabb& b : obstacles) covered += b.volume();
      return 1.0 - covered;
    }
    case MeasureMethod::Kind::kGrid: {
      if (method.resolution < 1) throw MethodError("grid resolution must be positive");
      const double cells_f = std::pow(static_cast<double>(method.resolution), d);
      if (cells_f > 5.0e8) throw MethodError("grid too large for this dimension");
      const auto cells = static_cast<std::uint64_t>(cells_f);
      const double h = 1.0 / method.resolution;
      std::vector<int> idx(d, 0);
      Point center(d);
      std::uint64_t free_cells = 0;
      for (std::uint64_t c = 0; c < cells; ++c) {
        for (int i = 0; i < d; ++i) center[i] = (idx[i] + 0.5) * h;
        if (!in_any(center, obstacles)) ++free_cells;
        for (int i = 0; i < d; ++i) {
          if (++idx[i] < method.resolution) break;
          idx[i] = 0;
        }
      }
      return static_cast<double>(free_cells) / static_cast<double>(cells);
    }
    case MeasureMethod::Kind::kMonteCarlo: {
      if (method.samples == 0) throw MethodError("monte-carlo measure needs samples");
      Rng rng(method.seed, streams::kMeasure);
      Point x(d);
      std::uint64_t hits = 0;
      for (std::uint64_t s = 0; s < method.samples; ++s) {
        for (int i = 0; i < d; ++i) x[i] = rng.uniform();
        if (!in_any(x, obstacles)) ++hits;
      }
      return static_cast<double>(hits) / static_cast<double>(method.samples);
    }
  }
  throw MethodError("unknown measure method");
}

World inflate_obstacles(const World& world, PointView half_extents) {
  const int d = world.dim();
  if (static_cast<int>(half_extents.size()) != d) throw InputError("half extents dimension mismatch");
  for (double h : half_extents) {
    if (!(h >= 0.0)) throw InputError("half extents must be nonnegative");
  }
  std::vector<Aabb> grown;
  grown.reserve(world.obstacles().size());
  for (const Aabb& b : world.obstacles()) {
    Aabb g = b;
    for (int i = 0; i < d; ++i) {
      g.lo[i] = std::max(0.0, b.lo[i] - half_extents[i]);
      g.hi[i] = std::min(1.0, b.hi[i] + half_extents[i]);
    }
    grown.push_back(std::move(g));
  }
  return World(d, std::move(grown));
}

}  // namespace fmtstar
