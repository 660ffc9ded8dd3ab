#include "fmtstar/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>

#include "fmtstar/errors.hpp"
#include "fmtstar/planners.hpp"

namespace fmtstar {

void GridSpec::validate(int dim) const {
  if (resolution < 16) throw InputError("grid resolution must be at least 16");
  if (connectivity == Connectivity::kFullDiagonal && dim > 3) throw InputError("full-diagonal grids support d <= 3");
  if (dim > 5) throw InputError("grid oracle supports d <= 5");
  if (std::pow(static_cast<double>(resolution), dim) > 2e8) throw InputError("grid too large");
}

GridResult grid_dijkstra(const ProblemDef& problem, const GridSpec& spec) {
  const int d = problem.dim();
  spec.validate(d);
  const int res = spec.resolution;
  std::size_t cells = 1;
  for (int i = 0; i < d; ++i) cells *= static_cast<std::size_t>(res);

  auto coords = [&](std::size_t id, std::vector<int>& c) {
    for (int i = 0; i < d; ++i) {
      c[i] = static_cast<int>(id % res);
      id /= res;
    }
  };
  auto center = [&](const std::vector<int>& c) {
    Point p(d);
    for (int i = 0; i < d; ++i) p[i] = (c[i] + 0.5) / res;
    return p;
  };
  auto cell_of = [&](PointView x) {
    std::size_t id = 0;
    for (int i = d - 1; i >= 0; --i) id = id * res + std::clamp(static_cast<int>(x[i] * res), 0, res - 1);
    return id;
  };

  std::vector<std::vector<int>> offsets;
  if (spec.connectivity == GridSpec::Connectivity::kAxis) {
    for (int i = 0; i < d; ++i) {
      for (int s : {-1, 1}) {
        std::vector<int> o(d, 0);
        o[i] = s;
        offsets.push_back(o);
      }
    }
  } else {
    std::vector<int> o(d, -1);
    for (;;) {
      if (std::any_of(o.begin(), o.end(), [](int v) { return v != 0; })) offsets.push_back(o);
      int i = 0;
      while (i < d && o[i] == 1) o[i++] = -1;
      if (i == d) break;
      ++o[i];
    }
  }

  GridResult result;
  const std::size_t start = cell_of(problem.x_init);
  const std::size_t goal_cell = cell_of(problem.goal.kind == GoalRegion::Kind::kBall ? problem.goal.center
                                                                                      : problem.goal.bounds().lo);
  std::vector<int> c(d);
  coords(start, c);
  const Point start_center = center(c);
  if (!problem.world.point_free(start_center) || !segment_collision_free(problem.x_init, start_center, problem.world)) {
    return result;
  }

  std::vector<std::int8_t> free_state(cells, -1);  // lazily evaluated
  auto is_free = [&](std::size_t id, const Point& p) {
    if (free_state[id] < 0) free_state[id] = problem.world.point_free(p) ? 1 : 0;
    return free_state[id] == 1;
  };
  std::vector<double> dist(cells, std::numeric_limits<double>::infinity());
  std::vector<std::int64_t> parent(cells, -1);
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  dist[start] = problem.cost.pair_cost(problem.x_init, start_center);
  heap.emplace(dist[start], start);
  std::vector<int> nc(d);
  std::int64_t reached = -1;
  while (!heap.empty()) {
    const auto [du, u] = heap.top();
    heap.pop();
    if (du > dist[u]) continue;
    ++result.cells_settled;
    coords(u, c);
    const Point pu = center(c);
    if (u == goal_cell || problem.goal.contains_closed(pu)) {
      reached = static_cast<std::int64_t>(u);
      break;
    }
    for (const auto& o : offsets) {
      bool inside = true;
      std::size_t v = 0;
      for (int i = d - 1; i >= 0; --i) {
        nc[i] = c[i] + o[i];
        if (nc[i] < 0 || nc[i] >= res) inside = false;
        v = v * res + static_cast<std::size_t>(std::max(nc[i], 0));
      }
      if (!inside) continue;
      const Point pv = center(nc);
      if (!is_free(v, pv)) continue;
      const double cost = problem.cost.pair_cost(pu, pv);
      if (du + cost >= dist[v]) continue;
      if (!segment_collision_free(pu, pv, problem.world)) continue;
      dist[v] = du + cost;
      parent[v] = static_cast<std::int64_t>(u);
      heap.emplace(dist[v], v);
    }
  }
  if (reached < 0) return result;
  result.feasible = true;
  result.cost = dist[reached];
  for (std::int64_t v = reached; v >= 0; v = parent[v]) {
    coords(static_cast<std::size_t>(v), c);
    result.path.push_back(center(c));
  }
  result.path.push_back(problem.x_init);
  std::reverse(result.path.begin(), result.path.end());
  return result;
}

double exhaustive_shortest_path(const SampleSet& samples, double r, const ProblemDef& problem) {
  if (samples.n() > 20) throw InputError("exhaustive search supports n <= 20");
  const std::size_t m = samples.size();
  std::vector<std::vector<double>> w(m, std::vector<double>(m, std::numeric_limits<double>::infinity()));
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = a + 1; b < m; ++b) {
      const double cost = problem.cost.pair_cost(samples.points[a], samples.points[b]);
      if (cost < r && edge_collision_free(problem, samples.points[a], samples.points[b])) w[a][b] = w[b][a] = cost;
    }
  }
  double best = std::numeric_limits<double>::infinity();
  std::vector<bool> on_path(m, false);
  std::function<void(std::size_t, double)> walk = [&](std::size_t v, double cost) {
    if (cost >= best) return;
    if (problem.goal.contains(samples.points[v])) {
      best = cost;
      return;
    }
    on_path[v] = true;
    for (std::size_t u = 0; u < m; ++u) {
      if (!on_path[u] && std::isfinite(w[v][u])) walk(u, cost + w[v][u]);
    }
    on_path[v] = false;
  };
  if (m > 0) walk(0, 0.0);
  return best;
}

LazyTrapInstance lazy_trap_instance(LazyTrapVariant variant) {
  // x_init and x are farther apart than r, so x can only be reached through
  // u1 or u2. With the obstacle on segment u2-x, u1 is x's optimal parent.
  Point u2{0.43, 0.5};
  Aabb obstacle = make_box(Point{0.5, 0.45}, Point{0.52, 0.55});
  bool with_obstacle = true;
  switch (variant) {
    case LazyTrapVariant::kAllConditions:
      break;
    case LazyTrapVariant::kNoObstacle:
      with_obstacle = false;
      break;
    case LazyTrapVariant::kU2First:
      u2 = Point{0.40, 0.5};
      break;
    case LazyTrapVariant::kU1Cheaper:
      u2 = Point{0.45, 0.85};
      obstacle = make_box(Point{0.51, 0.66}, Point{0.54, 0.69});
      break;
  }
  LazyTrapInstance inst;
  inst.r = 0.4;
  ProblemDef& p = inst.problem;
  p.name = "lazy_trap";
  p.world = World(2, with_obstacle ? std::vector<Aabb>{obstacle} : std::vector<Aabb>{});
  p.x_init = Point{0.1, 0.5};
  const Point x{0.6, 0.5};
  p.goal = GoalRegion::ball(x, 0.01);
  inst.samples.points = {p.x_init, Point{0.3, 0.25}, u2, x};
  inst.samples.goal_sample = {false, false, false, true};
  return inst;
}

LazyTrapConditions lazy_trap_conditions(const LazyTrapInstance& inst) {
  const auto& pts = inst.samples.points;
  const CostModel& model = inst.problem.cost;
  const PlanResult graph = disk_graph_shortest_path(inst.problem, inst.samples, inst.r, true, true);
  const auto& c = graph.tree->cost_to_arrive;
  using I = LazyTrapInstance;
  LazyTrapConditions out{};
  out.within_radius = model.pair_cost(pts[I::kU2], pts[I::kX]) < inst.r;
  out.u2_costlier = c[I::kU2] > c[I::kU1];
  out.u2_cheaper_free = c[I::kU2] + model.pair_cost(pts[I::kU2], pts[I::kX]) <
                        c[I::kU1] + model.pair_cost(pts[I::kU1], pts[I::kX]);
  out.u2_blocked = !edge_collision_free(inst.problem, pts[I::kU2], pts[I::kX]);
  return out;
}

}  // namespace fmtstar
