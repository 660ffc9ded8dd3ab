#include "fmtstar/planners.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <queue>
#include <unordered_map>
#include <unordered_set>

#include "fmtstar/errors.hpp"
#include "fmtstar/neighbors.hpp"
#include "fmtstar/rng.hpp"

namespace fmtstar {

namespace {

using Clock = std::chrono::steady_clock;
using HeapItem = std::pair<double, std::uint32_t>;
using MinHeap = std::priority_queue<HeapItem, std::vector<HeapItem>, std::greater<>>;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::uint64_t pair_key(std::uint32_t a, std::uint32_t b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

// Memoized CollisionFree over vertex pairs.
class EdgeChecker {
 public:
  EdgeChecker(const ProblemDef& problem, const std::vector<Point>& points, bool cache)
      : problem_(problem), points_(points), cache_(cache) {}

  bool free(std::uint32_t a, std::uint32_t b) {
    if (!cache_) {
      ++checks_;
      return edge_collision_free(problem_, points_[a], points_[b]);
    }
    const auto [it, fresh] = memo_.try_emplace(pair_key(a, b), false);
    if (fresh) {
      ++checks_;
      it->second = edge_collision_free(problem_, points_[a], points_[b]);
    }
    return it->second;
  }

  std::uint64_t checks() const { return checks_; }

 private:
  const ProblemDef& problem_;
  const std::vector<Point>& points_;
  bool cache_;
  std::unordered_map<std::uint64_t, bool> memo_;
  std::uint64_t checks_ = 0;
};

void check_inputs(const ProblemDef& problem, const SampleSet& samples) {
  if (samples.points.empty()) throw InputError("sample set is empty");
  if (!(samples.points.front() == problem.x_init)) throw InputError("sample 0 must be x_init");
  for (const Point& p : samples.points) {
    if (static_cast<int>(p.dim()) != problem.dim()) throw InputError("sample dimension mismatch");
  }
}

void extract_path(PlanResult& result, const std::vector<Point>& points, const std::vector<std::int64_t>& parent,
                  std::uint32_t goal_node, double cost) {
  std::vector<std::uint32_t> nodes;
  for (std::int64_t v = goal_node; v != Tree::kNoParent; v = parent[v]) nodes.push_back(static_cast<std::uint32_t>(v));
  std::reverse(nodes.begin(), nodes.end());
  result.success = true;
  result.cost = cost;
  result.path_nodes = nodes;
  result.path.clear();
  for (std::uint32_t v : nodes) result.path.push_back(points[v]);
}

// Dijkstra from node 0; stops at the first goal node settled.
struct GraphSearch {
  std::vector<double> dist;
  std::vector<std::int64_t> parent;
  std::int64_t goal_node = -1;
  std::uint64_t settled = 0;
};

GraphSearch dijkstra(const std::vector<std::vector<std::pair<std::uint32_t, double>>>& adj,
                     const std::vector<Point>& points, const GoalRegion& goal) {
  GraphSearch s;
  const std::size_t n = adj.size();
  s.dist.assign(n, std::numeric_limits<double>::infinity());
  s.parent.assign(n, Tree::kNoParent);
  std::vector<bool> done(n, false);
  MinHeap heap;
  s.dist[0] = 0.0;
  heap.push({0.0, 0});
  while (!heap.empty()) {
    const auto [d, v] = heap.top();
    heap.pop();
    if (done[v]) continue;
    done[v] = true;
    ++s.settled;
    if (goal.contains(points[v])) {
      s.goal_node = v;
      return s;
    }
    for (const auto& [u, c] : adj[v]) {
      const double nd = d + c;
      if (nd < s.dist[u] || (nd == s.dist[u] && !done[u] && v < s.parent[u])) {
        s.dist[u] = nd;
        s.parent[u] = v;
        heap.push({nd, u});
      }
    }
  }
  return s;
}

}  // namespace

void PlannerConfig::validate() const {
  const int drivers = eta.has_value() + radius_multiplier.has_value() + radius_override.has_value();
  if (drivers > 1) throw InputError("set at most one of eta, radius multiplier and radius override");
  if (eta && !(*eta > -1.0)) throw InputError("eta must exceed -1");
  if (radius_multiplier && !(*radius_multiplier > 0.0)) throw InputError("radius multiplier must be positive");
  if (radius_override && !(*radius_override > 0.0)) throw InputError("radius override must be positive");
  if (k0 && !(*k0 > 0.0)) throw InputError("k0 must be positive");
  if (!(rrt.steer_fraction > 0.0 && rrt.steer_fraction <= 1.0)) throw InputError("steer fraction must be in (0, 1]");
  if (!(rrt.goal_bias >= 0.0 && rrt.goal_bias < 1.0)) throw InputError("goal bias must be in [0, 1)");
  if (rrt.k0 && !(*rrt.k0 > 0.0)) throw InputError("RRT* k0 must be positive");
}

double default_eta(int d) { return std::exp(1.0 / d) - 1.0; }

double default_k0(int d) { return std::pow(2.0, d) * std::numbers::e / d; }

double knn_k0_bound(int d) { return std::pow(3.0, d) * std::numbers::e * (1.0 + 1.0 / d); }

double connection_radius(std::size_t n, int d, double mu_free, double eta, double extra_multiplier,
                         double ball_volume) {
  if (n < 2) throw InputError("connection radius needs n >= 2");
  if (d < 1) throw InputError("dimension must be positive");
  if (!(mu_free > 0.0 && mu_free <= 1.0)) throw InputError("mu_free must lie in (0, 1]");
  const double zeta = ball_volume > 0.0 ? ball_volume : unit_ball_volume(d);
  const double inv_d = 1.0 / d;
  const double nn = static_cast<double>(n);
  return extra_multiplier * (1.0 + eta) * 2.0 * std::pow(inv_d, inv_d) * std::pow(mu_free / zeta, inv_d) *
         std::pow(std::log(nn) / nn, inv_d);
}

std::size_t knn_count(std::size_t n, int /*d*/, double k0) {
  if (n < 2) return 1;
  const double k = std::ceil(k0 * std::log(static_cast<double>(n)));
  return static_cast<std::size_t>(std::clamp(k, 1.0, static_cast<double>(n - 1)));
}

double planning_radius(const ProblemDef& problem, const SampleSet& samples, const PlannerConfig& config,
                       std::vector<std::string>* warnings) {
  if (config.radius_override) return *config.radius_override;
  const std::size_t n = samples.n();
  if (n < 2) return 0.0;
  const int d = problem.dim();
  double scale = 1.0;
  if (config.radius_multiplier) {
    scale = *config.radius_multiplier;
  } else {
    scale = 1.0 + config.eta.value_or(default_eta(d));
  }
  if (warnings && scale <= 1.0) {
    warnings->push_back("connection radius is at or below the asymptotic-optimality bound (eta <= 0)");
  }
  double extra = samples.radius_multiplier;
  double ball = unit_ball_volume(d);
  const CostModel& model = problem.cost;
  if (model.is_metric()) {
    ball = metric_ball_volume(model, d);
  } else {
    if (config.cost_radius_factor == PlannerConfig::CostRadiusFactor::kUpperOverLower) {
      if (!(model.f_lower() > 0.0)) throw InputError("f_upper / f_lower radius factor needs f_lower > 0");
      extra *= model.f_upper() / model.f_lower();
    } else {
      extra *= model.f_upper();
    }
  }
  // scale stands in for (1 + eta).
  return connection_radius(n, d, problem.world.mu_free(), scale - 1.0, extra, ball);
}

std::size_t planning_k(const ProblemDef& problem, const SampleSet& samples, const PlannerConfig& config) {
  const int d = problem.dim();
  double k0 = config.k0.value_or(default_k0(d));
  if (config.radius_multiplier) k0 *= *config.radius_multiplier;
  return knn_count(samples.n(), d, k0);
}

bool edge_collision_free(const ProblemDef& problem, PointView u, PointView v) {
  if (problem.cost.kind() != CostModel::Kind::kWeighted) return segment_collision_free(u, v, problem.world);
  for (const auto& [a, b] : problem.cost.straight_pieces(u, v)) {
    if (!segment_collision_free(a, b, problem.world)) return false;
  }
  return true;
}

double path_cost(const CostModel& model, const std::vector<Point>& path) {
  double c = 0.0;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) c += model.pair_cost(path[i], path[i + 1]);
  return c;
}

PlanResult fmt_plan(const ProblemDef& problem, const SampleSet& samples, const PlannerConfig& config) {
  config.validate();
  check_inputs(problem, samples);
  const auto start = Clock::now();
  PlanResult result;
  const auto& points = samples.points;
  const std::size_t n_nodes = points.size();
  const bool knn = config.variant == PlannerConfig::Variant::kKnn;
  if (knn) result.k = planning_k(problem, samples, config);
  else result.radius = planning_radius(problem, samples, config, &result.warnings);
  if (config.record_trace) result.trace.emplace();

  if (problem.goal.contains(problem.x_init)) {
    extract_path(result, points, std::vector<std::int64_t>(n_nodes, Tree::kNoParent), 0, 0.0);
    result.stats.wall_time_ms = elapsed_ms(start);
    return result;
  }

  NeighborIndex index(points, problem.cost);
  EdgeChecker edges(problem, points, config.cache_collisions);
  static const NeighborSet kEmpty;
  auto near_z = [&](std::uint32_t v) -> const NeighborSet& {
    if (knn) return n_nodes > 1 ? index.mutual_knn(v, result.k) : kEmpty;
    return result.radius > 0.0 ? index.radius(v, result.radius) : kEmpty;
  };
  auto near_x = [&](std::uint32_t v) -> const NeighborSet& {
    if (knn) return n_nodes > 1 ? index.knn(v, result.k) : kEmpty;
    return result.radius > 0.0 ? index.radius(v, result.radius) : kEmpty;
  };

  enum : std::uint8_t { kUnvisited, kOpen, kClosed };
  std::vector<std::uint8_t> state(n_nodes, kUnvisited);
  std::vector<double> cost(n_nodes, std::numeric_limits<double>::infinity());
  std::vector<std::int64_t> parent(n_nodes, Tree::kNoParent);
  MinHeap open;
  state[0] = kOpen;
  cost[0] = 0.0;
  if (result.trace) result.trace->admitted.push_back(0);

  std::uint32_t z = 0;
  std::vector<std::uint32_t> admitted;
  for (;;) {
    if (problem.goal.contains(points[z])) {
      extract_path(result, points, parent, z, cost[z]);
      break;
    }
    ++result.stats.iterations;
    if (result.trace) {
      result.trace->extracted.push_back(z);
      result.trace->extracted_costs.push_back(cost[z]);
    }
    admitted.clear();
    for (const Neighbor& xn : near_z(z)) {
      const std::uint32_t x = xn.index;
      if (state[x] != kUnvisited) continue;
      // Locally optimal open parent; ties go to the smaller index.
      std::int64_t best = -1;
      double best_cost = std::numeric_limits<double>::infinity();
      for (const Neighbor& yn : near_x(x)) {
        if (state[yn.index] != kOpen) continue;
        const double c = cost[yn.index] + yn.cost;
        if (c < best_cost || (c == best_cost && yn.index < best)) {
          best_cost = c;
          best = yn.index;
        }
      }
      if (best < 0) continue;
      if (edges.free(static_cast<std::uint32_t>(best), x)) {
        parent[x] = best;
        cost[x] = best_cost;
        admitted.push_back(x);
      }
    }
    state[z] = kClosed;
    for (std::uint32_t x : admitted) {
      state[x] = kOpen;
      open.push({cost[x], x});
      if (result.trace) result.trace->admitted.push_back(x);
    }
    if (open.empty()) break;
    z = open.top().second;
    open.pop();
  }

  result.stats.collision_checks = edges.checks();
  result.stats.cost_evaluations = index.cost_evaluations();
  result.stats.near_computations = index.near_computations();
  if (config.keep_tree) result.tree = Tree{parent, cost};
  result.stats.wall_time_ms = elapsed_ms(start);
  return result;
}

PlanResult prm_star_plan(const ProblemDef& problem, const SampleSet& samples, const PlannerConfig& config) {
  config.validate();
  check_inputs(problem, samples);
  const auto start = Clock::now();
  PlanResult result;
  const auto& points = samples.points;
  const std::size_t n_nodes = points.size();
  const bool knn = config.variant == PlannerConfig::Variant::kKnn;
  if (knn) result.k = planning_k(problem, samples, config);
  else result.radius = planning_radius(problem, samples, config, &result.warnings);

  if (problem.goal.contains(problem.x_init)) {
    extract_path(result, points, std::vector<std::int64_t>(n_nodes, Tree::kNoParent), 0, 0.0);
    result.stats.wall_time_ms = elapsed_ms(start);
    return result;
  }

  NeighborIndex index(points, problem.cost);
  EdgeChecker edges(problem, points, true);
  std::vector<std::vector<std::pair<std::uint32_t, double>>> adj(n_nodes);
  std::unordered_set<std::uint64_t> seen;
  for (std::uint32_t v = 0; v < n_nodes; ++v) {
    if (n_nodes < 2 || (!knn && !(result.radius > 0.0))) break;
    const NeighborSet& nv = knn ? index.knn(v, result.k) : index.radius(v, result.radius);
    for (const Neighbor& u : nv) {
      if (!knn && u.index < v) continue;  // each disk edge appears in both sets
      if (knn && !seen.insert(pair_key(v, u.index)).second) continue;
      if (edges.free(v, u.index)) {
        adj[v].push_back({u.index, u.cost});
        adj[u.index].push_back({v, u.cost});
      }
    }
  }
  const GraphSearch s = dijkstra(adj, points, problem.goal);
  result.stats.iterations = s.settled;
  if (s.goal_node >= 0) extract_path(result, points, s.parent, static_cast<std::uint32_t>(s.goal_node), s.dist[s.goal_node]);
  result.stats.collision_checks = edges.checks();
  result.stats.cost_evaluations = index.cost_evaluations();
  result.stats.near_computations = index.near_computations();
  if (config.keep_tree) result.tree = Tree{s.parent, s.dist};
  result.stats.wall_time_ms = elapsed_ms(start);
  return result;
}

PlanResult disk_graph_shortest_path(const ProblemDef& problem, const SampleSet& samples, double r,
                                    bool prune_obstacle_edges, bool keep_tree) {
  check_inputs(problem, samples);
  if (!(r > 0.0)) throw InputError("radius must be positive");
  const auto start = Clock::now();
  PlanResult result;
  result.radius = r;
  const auto& points = samples.points;
  const std::size_t n_nodes = points.size();
  std::vector<std::vector<std::pair<std::uint32_t, double>>> adj(n_nodes);
  for (std::uint32_t v = 0; v < n_nodes; ++v) {
    for (std::uint32_t u = v + 1; u < n_nodes; ++u) {
      const double c = problem.cost.pair_cost(points[v], points[u]);
      ++result.stats.cost_evaluations;
      if (!(c < r)) continue;
      if (prune_obstacle_edges) {
        ++result.stats.collision_checks;
        if (!edge_collision_free(problem, points[v], points[u])) continue;
      }
      adj[v].push_back({u, c});
      adj[u].push_back({v, c});
    }
  }
  const GraphSearch s = dijkstra(adj, points, problem.goal);
  result.stats.iterations = s.settled;
  if (s.goal_node >= 0) extract_path(result, points, s.parent, static_cast<std::uint32_t>(s.goal_node), s.dist[s.goal_node]);
  if (keep_tree) result.tree = Tree{s.parent, s.dist};
  result.stats.wall_time_ms = elapsed_ms(start);
  return result;
}

PlanResult rrt_star_plan(const ProblemDef& problem, const PlannerConfig& config, std::uint64_t seed,
                         std::size_t iterations) {
  config.validate();
  problem.validate();
  const auto start = Clock::now();
  PlanResult result;
  const int d = problem.dim();
  const CostModel& model = problem.cost;

  std::vector<std::int64_t> parent = {Tree::kNoParent};
  std::vector<double> cost = {0.0};
  std::vector<double> edge_cost = {0.0};
  std::vector<std::vector<std::uint32_t>> children(1);
  std::vector<std::uint32_t> goal_nodes;
  IncrementalIndex index(model, d);
  index.insert(problem.x_init);
  if (problem.goal.contains(problem.x_init)) {
    extract_path(result, {problem.x_init}, parent, 0, 0.0);
    result.stats.wall_time_ms = elapsed_ms(start);
    return result;
  }

  Rng rng(seed, streams::kRrt);
  const double step = config.rrt.steer_fraction * std::sqrt(static_cast<double>(d));
  const double k0 = config.rrt.k0.value_or(std::numbers::e + std::numbers::e / d);
  const Aabb goal_bounds = problem.goal.bounds();
  Point q(d);
  std::uint64_t checks = 0;
  auto free_edge = [&](PointView a, PointView b) {
    ++checks;
    return edge_collision_free(problem, a, b);
  };
  // Recomputes cost-to-arrive below `root` after its edge changed.
  auto propagate = [&](std::uint32_t root) {
    std::vector<std::uint32_t> stack = {root};
    while (!stack.empty()) {
      const std::uint32_t w = stack.back();
      stack.pop_back();
      cost[w] = cost[parent[w]] + edge_cost[w];
      stack.insert(stack.end(), children[w].begin(), children[w].end());
    }
  };

  for (std::size_t it = 0; it < iterations; ++it) {
    ++result.stats.iterations;
    if (rng.uniform() < config.rrt.goal_bias) {
      for (int i = 0; i < d; ++i) q[i] = rng.uniform(goal_bounds.lo[i], goal_bounds.hi[i]);
    } else {
      for (int i = 0; i < d; ++i) q[i] = rng.uniform();
    }
    const Neighbor nearest = index.knn(q, 1).front();
    if (!(nearest.cost > 0.0)) continue;
    const Point& from = index.point(nearest.index);
    Point x_new = nearest.cost > step ? model.interpolate(from, q, step / nearest.cost) : q;
    if (!problem.world.point_free(x_new)) continue;
    if (!free_edge(from, x_new)) continue;

    const std::size_t k = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(k0 * std::log(static_cast<double>(index.size() + 1)))));
    std::vector<Neighbor> near = index.knn(x_new, k);
    ++result.stats.near_computations;
    if (std::none_of(near.begin(), near.end(), [&](const Neighbor& n) { return n.index == nearest.index; })) {
      near.push_back({nearest.index, model.pair_cost(from, x_new)});
      ++result.stats.cost_evaluations;
    }
    // Lazy parent choice: cheapest candidate whose edge is free.
    std::vector<std::pair<double, std::uint32_t>> order;
    for (const Neighbor& n : near) order.push_back({cost[n.index] + n.cost, n.index});
    std::sort(order.begin(), order.end());
    std::int64_t best = -1;
    for (const auto& [c, u] : order) {
      if (u == nearest.index || free_edge(index.point(u), x_new)) {
        best = u;
        break;
      }
    }
    if (best < 0) continue;
    double best_edge = 0.0;
    for (const Neighbor& n : near) {
      if (n.index == best) best_edge = n.cost;
    }
    const std::uint32_t id = index.insert(x_new);
    parent.push_back(best);
    edge_cost.push_back(best_edge);
    cost.push_back(cost[best] + best_edge);
    children.emplace_back();
    children[best].push_back(id);
    if (problem.goal.contains(x_new)) goal_nodes.push_back(id);

    for (const Neighbor& n : near) {
      const std::uint32_t u = n.index;
      if (u == best || u == 0) continue;
      if (!(cost[id] + n.cost < cost[u])) continue;
      if (!free_edge(x_new, index.point(u))) continue;
      auto& siblings = children[parent[u]];
      siblings.erase(std::find(siblings.begin(), siblings.end(), u));
      parent[u] = id;
      edge_cost[u] = n.cost;
      children[id].push_back(u);
      propagate(u);
    }
  }

  std::int64_t best_goal = -1;
  for (std::uint32_t g : goal_nodes) {
    if (best_goal < 0 || cost[g] < cost[best_goal]) best_goal = g;
  }
  std::vector<Point> points(index.size());
  for (std::size_t i = 0; i < index.size(); ++i) points[i] = index.point(i);
  if (best_goal >= 0) extract_path(result, points, parent, static_cast<std::uint32_t>(best_goal), cost[best_goal]);
  result.stats.collision_checks = checks;
  result.stats.cost_evaluations += index.cost_evaluations();
  if (config.keep_tree) result.tree = Tree{parent, cost};
  result.stats.wall_time_ms = elapsed_ms(start);
  return result;
}

}  // namespace fmtstar
