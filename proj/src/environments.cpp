#include "fmtstar/environments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fmtstar/errors.hpp"
#include "fmtstar/rng.hpp"

namespace fmtstar {

using nlohmann::json;

namespace {

Aabb box2(double x0, double x1, double y0, double y1) { return Aabb{Point{x0, y0}, Point{x1, y1}}; }

// Box times an interval on a new last axis.
Aabb extend(const Aabb& b, double lo, double hi) {
  std::vector<double> l = b.lo.values();
  std::vector<double> h = b.hi.values();
  l.push_back(lo);
  h.push_back(hi);
  return Aabb{Point(std::move(l)), Point(std::move(h))};
}

Point extend(const Point& p, double x) {
  std::vector<double> v = p.values();
  v.push_back(x);
  return Point(std::move(v));
}

// Mirror used to stack maze copies in dimension `dim`: all axes flipped for
// the 2D base, the last axis flipped above that.
Point mirror(const Point& p, int dim) {
  Point out = p;
  for (int i = 0; i < dim; ++i) {
    if (dim == 2 || i == dim - 1) out[i] = 1.0 - p[i];
  }
  return out;
}

Aabb mirror(const Aabb& b, int dim) {
  Aabb out = b;
  for (int i = 0; i < dim; ++i) {
    if (dim == 2 || i == dim - 1) {
      out.lo[i] = 1.0 - b.hi[i];
      out.hi[i] = 1.0 - b.lo[i];
    }
  }
  return out;
}

// [0,1]^d minus `hole`, as interior-disjoint boxes.
std::vector<Aabb> cube_minus(const Aabb& hole) {
  const std::size_t d = hole.dim();
  std::vector<Aabb> out;
  Aabb core{Point(d, 0.0), Point(d, 1.0)};
  for (std::size_t i = 0; i < d; ++i) {
    if (hole.lo[i] > core.lo[i]) {
      Aabb below = core;
      below.hi[i] = hole.lo[i];
      out.push_back(below);
    }
    if (hole.hi[i] < core.hi[i]) {
      Aabb above = core;
      above.lo[i] = hole.hi[i];
      out.push_back(above);
    }
    core.lo[i] = hole.lo[i];
    core.hi[i] = hole.hi[i];
  }
  return out;
}

struct MazeLevel {
  std::vector<Aabb> obstacles;
  std::vector<Aabb> gates;
  Point x_init;
  Point goal;
  Aabb start;
  Aabb terminal;
};

MazeLevel base_maze(const MazeSpec& spec) {
  const double t = spec.wall_thickness;
  const double c = (1.0 - 2.0 * t) / 3.0;
  const double g = spec.corridor_fraction;
  MazeLevel m;
  m.obstacles = {box2(0.0, 1.0 - g, c, c + t), box2(g, 1.0, 2.0 * c + t, 2.0 * c + 2.0 * t)};
  m.gates = {box2(1.0 - g, 1.0, c, c), box2(1.0 - g, 1.0, c + t, c + t), box2(0.0, g, 2.0 * c + t, 2.0 * c + t),
             box2(0.0, g, 2.0 * c + 2.0 * t, 2.0 * c + 2.0 * t)};
  m.x_init = Point{c / 2.0, c / 2.0};
  m.goal = Point{1.0 - c / 2.0, 1.0 - c / 2.0};
  m.start = box2(0.0, c, 0.0, c);
  m.terminal = box2(1.0 - c, 1.0, 1.0 - c, 1.0);
  return m;
}

MazeLevel lift(const MazeLevel& prev, int prev_dim, double t) {
  const double a = (1.0 - t) / 2.0;
  const double b = (1.0 + t) / 2.0;
  MazeLevel m;
  for (const Aabb& o : prev.obstacles) m.obstacles.push_back(extend(o, 0.0, a));
  for (const Aabb& o : prev.obstacles) m.obstacles.push_back(extend(mirror(o, prev_dim), b, 1.0));
  for (const Aabb& piece : cube_minus(prev.terminal)) m.obstacles.push_back(extend(piece, a, b));

  for (const Aabb& g : prev.gates) m.gates.push_back(extend(g, 0.0, a));
  m.gates.push_back(extend(prev.terminal, a, a));
  m.gates.push_back(extend(prev.terminal, b, b));
  for (const Aabb& g : prev.gates) m.gates.push_back(extend(mirror(g, prev_dim), b, 1.0));

  m.x_init = extend(prev.x_init, a / 2.0);
  m.goal = extend(mirror(prev.goal, prev_dim), 1.0 - a / 2.0);
  m.start = extend(prev.start, 0.0, a);
  m.terminal = extend(mirror(prev.terminal, prev_dim), b, 1.0);
  return m;
}

json maze_spec_json(const MazeSpec& s) {
  return {{"dim", s.dim},
          {"wall_thickness", s.wall_thickness},
          {"corridor_fraction", s.corridor_fraction},
          {"goal_radius", s.goal_radius}};
}

// Length of segment pq inside the closed box.
double clipped_length(PointView p, PointView q, const Aabb& box) {
  double t0 = 0.0;
  double t1 = 1.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double dir = q[i] - p[i];
    if (dir == 0.0) {
      if (p[i] < box.lo[i] || p[i] > box.hi[i]) return 0.0;
      continue;
    }
    double ta = (box.lo[i] - p[i]) / dir;
    double tb = (box.hi[i] - p[i]) / dir;
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
    if (t0 >= t1) return 0.0;
  }
  return (t1 - t0) * distance(p, q);
}

}  // namespace

// ---------------------------------------------------------------------------
// Recursive maze

void MazeSpec::validate() const {
  if (dim < 2) throw SpecError("maze dimension must be at least 2");
  if (!(wall_thickness > 0.0 && wall_thickness <= 0.2)) throw SpecError("maze wall thickness must lie in (0, 0.2]");
  const double c = (1.0 - 2.0 * wall_thickness) / 3.0;
  const double a = (1.0 - wall_thickness) / 2.0;
  if (!(corridor_fraction > 0.0 && corridor_fraction < 1.0 - c)) {
    throw SpecError("corridor fraction must lie in (0, 1 - corridor height)");
  }
  if (!(goal_radius > 0.0 && goal_radius < std::min(c, a) / 2.0)) throw SpecError("goal radius does not fit the terminal cell");
}

MazeLayout build_maze(const MazeSpec& spec) {
  spec.validate();
  MazeLevel level = base_maze(spec);
  for (int d = 3; d <= spec.dim; ++d) level = lift(level, d - 1, spec.wall_thickness);

  MazeLayout layout;
  ProblemDef& p = layout.problem;
  p.name = "maze" + std::to_string(spec.dim) + "d";
  p.world = World(spec.dim, level.obstacles);
  p.x_init = level.x_init;
  p.goal = GoalRegion::ball(level.goal, spec.goal_radius);
  p.provenance = {{"generator", "recursive_maze"}, {"spec", maze_spec_json(spec)}, {"seed", nullptr}};
  layout.gates = std::move(level.gates);
  layout.start_region = level.start;
  layout.terminal_region = level.terminal;
  return layout;
}

ProblemDef recursive_maze(const MazeSpec& spec) { return build_maze(spec).problem; }

double gate_chain_length(PointView start, const std::vector<Aabb>& gates, PointView goal_center, double goal_radius,
                         double tolerance) {
  const std::size_t d = start.size();
  const std::size_t m = gates.size();
  const std::size_t vars = (m + 1) * d;  // gate points, then the goal point

  auto project = [&](std::vector<double>& x) {
    for (std::size_t g = 0; g < m; ++g) {
      for (std::size_t i = 0; i < d; ++i) x[g * d + i] = std::clamp(x[g * d + i], gates[g].lo[i], gates[g].hi[i]);
    }
    double* q = x.data() + m * d;
    double r2 = 0.0;
    for (std::size_t i = 0; i < d; ++i) r2 += (q[i] - goal_center[i]) * (q[i] - goal_center[i]);
    if (r2 > goal_radius * goal_radius) {
      const double s = goal_radius / std::sqrt(r2);
      for (std::size_t i = 0; i < d; ++i) q[i] = goal_center[i] + s * (q[i] - goal_center[i]);
    }
  };
  auto node = [&](const std::vector<double>& x, std::size_t k) -> const double* {
    return k == 0 ? start.data() : x.data() + (k - 1) * d;
  };
  auto value = [&](const std::vector<double>& x) {
    double f = 0.0;
    for (std::size_t k = 0; k <= m; ++k) {
      const double* u = node(x, k);
      const double* v = node(x, k + 1);
      double s = 0.0;
      for (std::size_t i = 0; i < d; ++i) s += (u[i] - v[i]) * (u[i] - v[i]);
      f += std::sqrt(s);
    }
    return f;
  };
  auto gradient = [&](const std::vector<double>& x, std::vector<double>& g) {
    std::fill(g.begin(), g.end(), 0.0);
    for (std::size_t k = 0; k <= m; ++k) {
      const double* u = node(x, k);
      const double* v = node(x, k + 1);
      double s = 0.0;
      for (std::size_t i = 0; i < d; ++i) s += (u[i] - v[i]) * (u[i] - v[i]);
      const double len = std::sqrt(s);
      if (len == 0.0) continue;
      for (std::size_t i = 0; i < d; ++i) {
        const double gi = (u[i] - v[i]) / len;
        if (k > 0) g[(k - 1) * d + i] += gi;
        g[k * d + i] -= gi;
      }
    }
  };

  std::vector<double> x(vars);
  for (std::size_t g = 0; g < m; ++g) {
    for (std::size_t i = 0; i < d; ++i) x[g * d + i] = 0.5 * (gates[g].lo[i] + gates[g].hi[i]);
  }
  for (std::size_t i = 0; i < d; ++i) x[m * d + i] = goal_center[i];
  project(x);

  // FISTA with backtracking and function-value restart. Stops once the
  // projected-gradient step at the iterate falls below `tolerance`.
  std::vector<double> prev = x, y = x, grad(vars), trial(vars);
  double fx = value(x);
  double lipschitz = 1.0;
  double momentum = 1.0;
  auto stationary = [&]() {
    gradient(x, grad);
    for (std::size_t j = 0; j < vars; ++j) trial[j] = x[j] - grad[j];
    project(trial);
    double sq = 0.0;
    for (std::size_t j = 0; j < vars; ++j) sq += (trial[j] - x[j]) * (trial[j] - x[j]);
    return std::sqrt(sq) <= tolerance;
  };
  for (int iter = 0; iter < 200000; ++iter) {
    if (iter % 64 == 0 && stationary()) break;
    const double fy = value(y);
    gradient(y, grad);
    for (;;) {
      for (std::size_t j = 0; j < vars; ++j) trial[j] = y[j] - grad[j] / lipschitz;
      project(trial);
      double lin = 0.0;
      double sq = 0.0;
      for (std::size_t j = 0; j < vars; ++j) {
        const double dj = trial[j] - y[j];
        lin += grad[j] * dj;
        sq += dj * dj;
      }
      if (value(trial) <= fy + lin + 0.5 * lipschitz * sq + 1e-15) break;
      lipschitz *= 2.0;
    }
    const double ft = value(trial);
    if (ft > fx) {
      momentum = 1.0;
      y = x;
      continue;
    }
    prev = x;
    x = trial;
    fx = ft;
    const double next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
    for (std::size_t j = 0; j < vars; ++j) y[j] = x[j] + (momentum - 1.0) / next * (x[j] - prev[j]);
    momentum = next;
    lipschitz *= 0.9;
  }
  return fx;
}

double maze_optimal_cost(const MazeSpec& spec) {
  const MazeLayout layout = build_maze(spec);
  return gate_chain_length(layout.problem.x_init, layout.gates, layout.problem.goal.center, spec.goal_radius);
}

// ---------------------------------------------------------------------------
// Bug trap

void BugTrapSpec::validate() const {
  if (center.dim() != 2 || x_init.dim() != 2 || goal_center.dim() != 2) throw SpecError("bug trap is two-dimensional");
  if (!(mouth_width > 0.0)) throw SpecError("bug trap mouth width must be positive");
  if (!(wall_thickness > 0.0)) throw SpecError("bug trap wall thickness must be positive");
  if (!(lip_depth >= 0.0)) throw SpecError("bug trap lip depth must be nonnegative");
  if (!(goal_radius > 0.0)) throw SpecError("goal radius must be positive");
  const double inner = 2.0 * (outer_radius - wall_thickness);
  if (!(inner > 0.0)) throw SpecError("bug trap walls fill the trap");
  if (!(mouth_width + 2.0 * wall_thickness < inner)) throw SpecError("bug trap mouth and lips do not fit");
  if (!(lip_depth < inner)) throw SpecError("bug trap lips longer than the cavity");
  for (int i = 0; i < 2; ++i) {
    if (center[i] - outer_radius < 0.0 || center[i] + outer_radius > 1.0) throw SpecError("bug trap leaves the unit square");
  }
}

ProblemDef bug_trap_2d(const BugTrapSpec& spec) {
  spec.validate();
  const double cx = spec.center[0];
  const double cy = spec.center[1];
  const double r = spec.outer_radius;
  const double w = spec.wall_thickness;
  const double x0 = cx - r, x1 = cx + r, y0 = cy - r, y1 = cy + r;
  const double m = spec.mouth_width / 2.0;
  std::vector<Aabb> walls = {
      box2(x0, x0 + w, y0, y1),                          // back wall
      box2(x0 + w, x1, y1 - w, y1),                      // top
      box2(x0 + w, x1, y0, y0 + w),                      // bottom
      box2(x1 - w, x1, cy + m, y1 - w),                  // front, above the mouth
      box2(x1 - w, x1, y0 + w, cy - m),                  // front, below the mouth
  };
  if (spec.lip_depth > 0.0) {
    walls.push_back(box2(x1 - w - spec.lip_depth, x1 - w, cy + m, cy + m + w));
    walls.push_back(box2(x1 - w - spec.lip_depth, x1 - w, cy - m - w, cy - m));
  }

  ProblemDef p;
  p.name = "bugtrap";
  p.world = World(2, std::move(walls));
  p.x_init = spec.x_init;
  p.goal = GoalRegion::ball(spec.goal_center, spec.goal_radius);
  if (!p.world.point_free(p.x_init)) throw SpecError("bug trap start is inside a wall");
  if (!p.world.point_free(p.goal.center)) throw SpecError("bug trap goal center is inside a wall");
  p.provenance = {{"generator", "bug_trap_2d"},
                  {"spec",
                   {{"center", spec.center.values()},
                    {"outer_radius", spec.outer_radius},
                    {"mouth_width", spec.mouth_width},
                    {"lip_depth", spec.lip_depth},
                    {"wall_thickness", spec.wall_thickness},
                    {"x_init", spec.x_init.values()},
                    {"goal_center", spec.goal_center.values()},
                    {"goal_radius", spec.goal_radius}}},
                  {"seed", nullptr}};
  return p;
}

// ---------------------------------------------------------------------------
// Cost-field demos

Aabb cost_field_block() { return box2(0.4, 0.6, 0.1, 0.9); }

ProblemDef cost_field_demo(CostFieldKind kind) {
  ProblemDef p;
  p.world = World(2, {});
  p.x_init = Point{0.1, 0.5};
  p.goal = GoalRegion::ball(Point{0.9, 0.5}, 0.05);
  std::string name;
  switch (kind) {
    case CostFieldKind::kHighCostBlock:
    case CostFieldKind::kHigherCostBlock: {
      const double factor = kind == CostFieldKind::kHighCostBlock ? 2.0 : 4.0;
      BoxRegionField field{1.0, {{cost_field_block(), factor}}};
      p.cost = CostModel::line_integral(field, 1.0, factor);
      name = kind == CostFieldKind::kHighCostBlock ? "costfield-block2" : "costfield-block4";
      break;
    }
    case CostFieldKind::kRadial: {
      RadialField field{Point{0.5, 0.5}, 1.0, 0.1, 0.05};
      p.cost = CostModel::line_integral(field, 1.0, 3.0);
      name = "costfield-radial";
      break;
    }
  }
  p.name = name;
  p.provenance = {{"generator", "cost_field_demo"}, {"spec", {{"kind", name}}}, {"seed", nullptr}};
  return p;
}

CostFieldOracle cost_field_oracle(const ProblemDef& problem, int resolution) {
  if (resolution < 2) throw InputError("oracle resolution must be at least 2");
  const Aabb block = cost_field_block();
  const CostModel& model = problem.cost;
  const Point& s = problem.x_init;
  const Point& g = problem.goal.center;
  const double xi = problem.goal.xi;
  // Cost from p to the nearest point of the goal ball along the straight line.
  auto to_goal = [&](const Point& p) {
    const double len = distance(p, g);
    if (len <= xi) return 0.0;
    return model.pair_cost(p, lerp(g, p, xi / len));
  };
  const double x_in = block.lo[0];
  const double x_out = block.hi[0];
  const double y_lo = block.lo[1];
  const double y_hi = block.hi[1];
  std::vector<double> enter(resolution), leave(resolution);
  std::vector<Point> in_pts, out_pts;
  for (int i = 0; i < resolution; ++i) {
    const double y = y_lo + (y_hi - y_lo) * i / (resolution - 1);
    in_pts.push_back(Point{x_in, y});
    out_pts.push_back(Point{x_out, y});
    enter[i] = model.pair_cost(s, in_pts.back());
    leave[i] = to_goal(out_pts.back());
  }
  double through = std::numeric_limits<double>::infinity();
  for (int i = 0; i < resolution; ++i) {
    for (int j = 0; j < resolution; ++j) {
      through = std::min(through, enter[i] + model.pair_cost(in_pts[i], out_pts[j]) + leave[j]);
    }
  }
  // Around a corner pair, nudged off the closed block boundary.
  const double eps = 1e-9;
  double detour = std::numeric_limits<double>::infinity();
  for (double y : {y_hi + eps, y_lo - eps}) {
    const Point a{x_in - eps, y};
    const Point b{x_out + eps, y};
    detour = std::min(detour, model.pair_cost(s, a) + model.pair_cost(a, b) + to_goal(b));
  }
  return {through, detour};
}

double length_inside(const std::vector<Point>& path, const Aabb& box) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) total += clipped_length(path[i], path[i + 1], box);
  return total;
}

// ---------------------------------------------------------------------------
// Random clutter

void ClutterSpec::validate() const {
  if (dim < 2) throw SpecError("clutter dimension must be at least 2");
  if (count < 0) throw SpecError("obstacle count must be nonnegative");
  if (!(coverage >= 0.0 && coverage < 1.0)) throw SpecError("coverage must lie in [0, 1)");
  if (!(max_extent > 0.0 && max_extent <= 1.0)) throw SpecError("max extent must lie in (0, 1]");
  if (coverage > 0.0 && count == 0) throw SpecError("positive coverage needs obstacles");
  if (coverage > 0.0 && std::pow(coverage / count, 1.0 / dim) > max_extent) {
    throw SpecError("boxes at this coverage exceed the max extent");
  }
  if (!(goal_radius > 0.0 && goal_radius < 0.5)) throw SpecError("goal radius must lie in (0, 0.5)");
}

ProblemDef random_clutter(const ClutterSpec& spec, std::uint64_t seed) {
  spec.validate();
  const int d = spec.dim;
  Rng rng(seed, streams::kEnvironment);
  const Point x_init(d, 0.05);
  const Point goal_center(d, 0.95);
  constexpr int kLayoutAttempts = 200;
  constexpr int kPlacementAttempts = 10000;

  for (int layout = 0; layout < kLayoutAttempts; ++layout) {
    std::vector<Aabb> boxes;
    bool failed = false;
    if (spec.coverage > 0.0) {
      const double side = std::pow(spec.coverage / spec.count, 1.0 / d);
      for (int b = 0; b < spec.count && !failed; ++b) {
        bool placed = false;
        for (int attempt = 0; attempt < kPlacementAttempts && !placed; ++attempt) {
          // Random aspect ratio with the exact target volume.
          std::vector<double> log_aspect(d);
          double mean = 0.0;
          for (int i = 0; i < d; ++i) {
            log_aspect[i] = rng.uniform(-0.5, 0.5);
            mean += log_aspect[i] / d;
          }
          Aabb box{Point(d), Point(d)};
          bool fits = true;
          for (int i = 0; i < d; ++i) {
            const double len = side * std::exp(log_aspect[i] - mean);
            if (len > spec.max_extent || len >= 1.0) fits = false;
            box.lo[i] = rng.uniform(0.0, std::max(0.0, 1.0 - len));
            box.hi[i] = std::min(1.0, box.lo[i] + len);
          }
          if (!fits) continue;
          if (box.distance_to(x_init) <= spec.start_goal_clearance) continue;
          if (box.distance_to(goal_center) <= spec.goal_radius + spec.start_goal_clearance) continue;
          if (spec.visibility == ClutterSpec::Visibility::kVisible &&
              !segment_collision_free(x_init, goal_center, World(d, {box}))) {
            continue;
          }
          if (spec.disjoint && std::any_of(boxes.begin(), boxes.end(),
                                           [&](const Aabb& o) { return o.overlap_volume(box) > 0.0; })) {
            continue;
          }
          boxes.push_back(std::move(box));
          placed = true;
        }
        failed = !placed;
      }
    }
    if (failed) continue;

    ProblemDef p;
    p.name = "clutter" + std::to_string(d) + "d-" + std::to_string(seed);
    p.world = World(d, std::move(boxes));
    p.x_init = x_init;
    p.goal = GoalRegion::ball(goal_center, spec.goal_radius);
    const bool visible = segment_collision_free(x_init, goal_center, p.world);
    if ((spec.visibility == ClutterSpec::Visibility::kBlocked && visible) ||
        (spec.visibility == ClutterSpec::Visibility::kVisible && !visible)) {
      continue;
    }
    const char* vis = spec.visibility == ClutterSpec::Visibility::kAny       ? "any"
                      : spec.visibility == ClutterSpec::Visibility::kBlocked ? "blocked"
                                                                              : "visible";
    p.provenance = {{"generator", "random_clutter"},
                    {"spec",
                     {{"dim", d},
                      {"count", spec.count},
                      {"coverage", spec.coverage},
                      {"max_extent", spec.max_extent},
                      {"disjoint", spec.disjoint},
                      {"visibility", vis},
                      {"start_goal_clearance", spec.start_goal_clearance},
                      {"goal_radius", spec.goal_radius}}},
                    {"seed", seed},
                    {"layout_attempt", layout}};
    return p;
  }
  throw SpecError("random clutter placement failed after bounded retries");
}

}  // namespace fmtstar
