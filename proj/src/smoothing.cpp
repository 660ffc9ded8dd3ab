#include "fmtstar/smoothing.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "fmtstar/errors.hpp"
#include "fmtstar/rng.hpp"

namespace fmtstar {

namespace {

constexpr double kBridgeFractions[] = {0.5, 0.25, 0.125};
constexpr double kStallTolerance = 1e-6;
constexpr std::uint64_t kMaxSpan = 10;  // longest single-axis stretch, in segments

class Smoother {
 public:
  Smoother(const World& world, const CostModel& model) : world_(world), model_(model) {}

  // Repeated queries of the same segment are answered from the memo and not counted.
  bool free(PointView a, PointView b) {
    auto key = std::make_pair(std::vector<double>(a.begin(), a.end()), std::vector<double>(b.begin(), b.end()));
    if (key.second < key.first) std::swap(key.first, key.second);
    if (const auto it = memo_.find(key); it != memo_.end()) return it->second;
    ++checks_;
    bool ok = true;
    for (const auto& [p, q] : model_.straight_pieces(a, b)) {
      if (!segment_collision_free(p, q, world_)) {
        ok = false;
        break;
      }
    }
    memo_.emplace(std::move(key), ok);
    return ok;
  }

  double cost(PointView a, PointView b) const { return model_.pair_cost(a, b); }

  double total(const std::vector<Point>& path) const {
    double c = 0.0;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) c += cost(path[i], path[i + 1]);
    return c;
  }

  void vertex_pass(std::vector<Point>& path) {
    std::size_t i = 1;
    while (i + 1 < path.size()) {
      const Point& p = path[i - 1];
      const Point& v = path[i];
      const Point& q = path[i + 1];
      const double before = cost(p, v) + cost(v, q);
      if (cost(p, q) < before && free(p, q)) {
        path.erase(path.begin() + static_cast<std::ptrdiff_t>(i));
        continue;
      }
      bool bridged = false;
      for (double f : kBridgeFractions) {
        Point a = model_.interpolate(v, p, f);
        Point b = model_.interpolate(v, q, f);
        const double after = cost(p, a) + cost(a, b) + cost(b, q);
        if (after < before && free(a, b)) {
          path[i] = std::move(a);
          path.insert(path.begin() + static_cast<std::ptrdiff_t>(i) + 1, std::move(b));
          i += 2;
          bridged = true;
          break;
        }
      }
      if (!bridged) ++i;
    }
  }

  void random_pass(std::vector<Point>& path, Rng& rng, double per_vertex) {
    const auto attempts = static_cast<std::size_t>(std::ceil(per_vertex * static_cast<double>(path.size())));
    for (std::size_t a = 0; a < attempts && path.size() > 2; ++a) {
      std::vector<double> prefix(path.size(), 0.0);
      for (std::size_t i = 1; i < path.size(); ++i) prefix[i] = prefix[i - 1] + cost(path[i - 1], path[i]);
      double s = rng.uniform(0.0, prefix.back());
      double t = rng.uniform(0.0, prefix.back());
      if (s > t) std::swap(s, t);
      const std::size_t i = segment_at(prefix, s);
      const std::size_t j = segment_at(prefix, t);
      if (i == j) continue;
      Point from = point_at(path, prefix, i, s);
      Point to = point_at(path, prefix, j, t);
      double before = cost(from, path[i + 1]) + cost(path[j], to);
      for (std::size_t m = i + 1; m < j; ++m) before += cost(path[m], path[m + 1]);
      if (!(cost(from, to) < before) || !free(from, to)) continue;
      std::vector<Point> next(path.begin(), path.begin() + static_cast<std::ptrdiff_t>(i) + 1);
      next.push_back(std::move(from));
      next.push_back(std::move(to));
      next.insert(next.end(), path.begin() + static_cast<std::ptrdiff_t>(j) + 1, path.end());
      path = std::move(next);
    }
  }

  // Straightens one coordinate over a random stretch, leaving the others alone.
  // Straightens one coordinate of the vertices strictly between two path
  // vertices, leaving the other coordinates alone.
  void partial_pass(std::vector<Point>& path, Rng& rng, double per_vertex) {
    std::vector<std::size_t> axes;
    for (std::size_t k = 0; k < path.front().dim(); ++k) {
      if (!model_.embedding_wrapped(k)) axes.push_back(k);
    }
    if (axes.empty()) return;
    const auto attempts = static_cast<std::size_t>(std::ceil(per_vertex * static_cast<double>(path.size())));
    for (std::size_t a = 0; a < attempts && path.size() > 2; ++a) {
      const std::size_t i = rng.below(path.size() - 2);
      const std::size_t j = std::min(path.size() - 1, i + 2 + rng.below(kMaxSpan - 1));
      const std::size_t axis = axes[rng.below(axes.size())];
      std::vector<double> arc(j - i + 1, 0.0);
      for (std::size_t m = i + 1; m <= j; ++m) arc[m - i] = arc[m - i - 1] + cost(path[m - 1], path[m]);
      std::vector<Point> mid(path.begin() + static_cast<std::ptrdiff_t>(i), path.begin() + static_cast<std::ptrdiff_t>(j) + 1);
      const double lo = path[i][axis];
      const double hi = path[j][axis];
      for (std::size_t m = 1; m + 1 < mid.size(); ++m) mid[m][axis] = lo + (hi - lo) * arc[m] / arc.back();
      if (!(total(mid) < arc.back())) continue;
      bool ok = true;
      for (std::size_t m = 0; ok && m + 1 < mid.size(); ++m) ok = free(mid[m], mid[m + 1]);
      if (!ok) continue;
      std::copy(mid.begin() + 1, mid.end() - 1, path.begin() + static_cast<std::ptrdiff_t>(i) + 1);
    }
  }

  std::uint64_t checks() const { return checks_; }

 private:
  static std::size_t segment_at(const std::vector<double>& prefix, double s) {
    const auto it = std::upper_bound(prefix.begin(), prefix.end(), s);
    const auto seg = static_cast<std::size_t>(it - prefix.begin());
    return std::clamp<std::size_t>(seg == 0 ? 0 : seg - 1, 0, prefix.size() - 2);
  }

  Point point_at(const std::vector<Point>& path, const std::vector<double>& prefix, std::size_t seg, double s) const {
    const double len = prefix[seg + 1] - prefix[seg];
    const double f = len > 0.0 ? std::clamp((s - prefix[seg]) / len, 0.0, 1.0) : 0.0;
    return model_.interpolate(path[seg], path[seg + 1], f);
  }

  const World& world_;
  const CostModel& model_;
  std::uint64_t checks_ = 0;
  std::map<std::pair<std::vector<double>, std::vector<double>>, bool> memo_;
};

}  // namespace

void SmoothParams::validate() const {
  if (stall_rounds < 1 || max_rounds < stall_rounds) throw SpecError("need max_rounds >= stall_rounds >= 1");
  if (!(random_attempts_per_vertex >= 0.0) || !(partial_attempts_per_vertex >= 0.0)) {
    throw SpecError("shortcut attempts must be nonnegative");
  }
}

SmoothResult adaptive_shortcut(const std::vector<Point>& path, const World& world, const CostModel& model,
                               const SmoothParams& params) {
  params.validate();
  Smoother smoother(world, model);
  SmoothResult result;
  result.path = path;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    if (!smoother.free(path[i], path[i + 1])) throw InputError("path to smooth is in collision");
  }
  result.cost = smoother.total(path);
  result.cost_trace.push_back(result.cost);
  if (path.size() <= 2) {
    result.collision_checks = smoother.checks();
    return result;
  }

  Rng rng(params.seed, streams::kSmoothing);
  int stalled = 0;
  while (result.rounds < params.max_rounds && stalled < params.stall_rounds) {
    std::vector<Point> candidate = result.path;
    smoother.vertex_pass(candidate);
    smoother.random_pass(candidate, rng, params.random_attempts_per_vertex);
    smoother.partial_pass(candidate, rng, params.partial_attempts_per_vertex);
    const double c = smoother.total(candidate);
    ++result.rounds;
    const double before = result.cost;
    if (c <= before) {
      result.path = std::move(candidate);
      result.cost = c;
    }
    result.cost_trace.push_back(result.cost);
    stalled = before - result.cost > kStallTolerance * before ? 0 : stalled + 1;
  }
  result.collision_checks = smoother.checks();
  return result;
}

}  // namespace fmtstar
