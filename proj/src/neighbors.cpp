#include "fmtstar/neighbors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>

#include "fmtstar/errors.hpp"

namespace fmtstar {

namespace {

constexpr std::uint32_t kLeafSize = 12;
// Relative widening of embedded search radii so rounding never drops a true neighbor.
constexpr double kSearchSlack = 1e-9;

bool neighbor_less(const Neighbor& a, const Neighbor& b) {
  return a.cost < b.cost || (a.cost == b.cost && a.index < b.index);
}

double widen(double r, double lower_factor) { return r / lower_factor * (1.0 + kSearchSlack) + 1e-15; }

}  // namespace

// ---------------------------------------------------------------------------
// KdTree

KdTree::KdTree(int dim, std::vector<double> coords, std::vector<std::uint32_t> ids, std::vector<double> periods)
    : dim_(dim), coords_(std::move(coords)), ids_(std::move(ids)), periods_(std::move(periods)) {
  if (periods_.empty()) periods_.assign(dim_, 0.0);
  if (coords_.size() != ids_.size() * static_cast<std::size_t>(dim_)) throw InputError("kd-tree coordinate count");
  if (!ids_.empty()) root_ = build(0, static_cast<std::uint32_t>(ids_.size()));
}

std::int32_t KdTree::build(std::uint32_t begin, std::uint32_t end) {
  Node node;
  node.begin = begin;
  node.end = end;
  node.lo.assign(dim_, std::numeric_limits<double>::infinity());
  node.hi.assign(dim_, -std::numeric_limits<double>::infinity());
  for (std::uint32_t s = begin; s < end; ++s) {
    for (int i = 0; i < dim_; ++i) {
      node.lo[i] = std::min(node.lo[i], coords_[s * dim_ + i]);
      node.hi[i] = std::max(node.hi[i], coords_[s * dim_ + i]);
    }
  }
  const auto self = static_cast<std::int32_t>(nodes_.size());
  nodes_.push_back(node);
  if (end - begin <= kLeafSize) return self;

  int axis = 0;
  for (int i = 1; i < dim_; ++i) {
    if (node.hi[i] - node.lo[i] > node.hi[axis] - node.lo[axis]) axis = i;
  }
  // Sort a permutation of the slot range by the split coordinate, then apply it.
  std::vector<std::uint32_t> order(end - begin);
  std::iota(order.begin(), order.end(), begin);
  const std::uint32_t mid_offset = (end - begin) / 2;
  std::nth_element(order.begin(), order.begin() + mid_offset, order.end(), [&](std::uint32_t a, std::uint32_t b) {
    return coords_[a * dim_ + axis] < coords_[b * dim_ + axis];
  });
  std::vector<double> c(order.size() * dim_);
  std::vector<std::uint32_t> id(order.size());
  for (std::size_t j = 0; j < order.size(); ++j) {
    std::copy_n(coords_.begin() + order[j] * dim_, dim_, c.begin() + j * dim_);
    id[j] = ids_[order[j]];
  }
  std::copy(c.begin(), c.end(), coords_.begin() + static_cast<std::size_t>(begin) * dim_);
  std::copy(id.begin(), id.end(), ids_.begin() + begin);

  const std::int32_t left = build(begin, begin + mid_offset);
  const std::int32_t right = build(begin + mid_offset, end);
  nodes_[self].left = left;
  nodes_[self].right = right;
  return self;
}

double KdTree::squared_distance_to(PointView q, std::size_t slot) const {
  const double* p = coords(slot);
  double s = 0.0;
  for (int i = 0; i < dim_; ++i) {
    double d = std::abs(q[i] - p[i]);
    if (periods_[i] > 0.0) d = std::min(d, periods_[i] - d);
    s += d * d;
  }
  return s;
}

double KdTree::box_gap2(const Node& node, PointView q) const {
  double s = 0.0;
  for (int i = 0; i < dim_; ++i) {
    const double lo = node.lo[i];
    const double hi = node.hi[i];
    const double p = periods_[i];
    double g = 0.0;
    if (q[i] < lo) {
      g = lo - q[i];
      if (p > 0.0) g = std::min(g, q[i] + p - hi);
    } else if (q[i] > hi) {
      g = q[i] - hi;
      if (p > 0.0) g = std::min(g, lo + p - q[i]);
    }
    g = std::max(g, 0.0);
    s += g * g;
  }
  return s;
}

void KdTree::within(PointView q, double r2, std::vector<std::uint32_t>& out) const {
  if (root_ >= 0) within_rec(root_, q, r2, out);
}

void KdTree::within_rec(std::int32_t index, PointView q, double r2, std::vector<std::uint32_t>& out) const {
  const Node& node = nodes_[index];
  if (box_gap2(node, q) > r2) return;
  if (node.left < 0) {
    for (std::uint32_t s = node.begin; s < node.end; ++s) {
      if (squared_distance_to(q, s) <= r2) out.push_back(ids_[s]);
    }
    return;
  }
  within_rec(node.left, q, r2, out);
  within_rec(node.right, q, r2, out);
}

void KdTree::nearest(PointView q, std::size_t k, std::vector<std::pair<double, std::uint32_t>>& out,
                     std::int64_t skip) const {
  out.clear();
  if (k == 0 || root_ < 0) return;
  nearest_rec(root_, q, k, out, skip);
  std::sort_heap(out.begin(), out.end());
}

void KdTree::nearest_rec(std::int32_t index, PointView q, std::size_t k,
                         std::vector<std::pair<double, std::uint32_t>>& heap, std::int64_t skip) const {
  const Node& node = nodes_[index];
  if (heap.size() == k && box_gap2(node, q) > heap.front().first) return;
  if (node.left < 0) {
    for (std::uint32_t s = node.begin; s < node.end; ++s) {
      if (static_cast<std::int64_t>(ids_[s]) == skip) continue;
      const std::pair<double, std::uint32_t> cand{squared_distance_to(q, s), ids_[s]};
      if (heap.size() < k) {
        heap.push_back(cand);
        std::push_heap(heap.begin(), heap.end());
      } else if (cand < heap.front()) {
        std::pop_heap(heap.begin(), heap.end());
        heap.back() = cand;
        std::push_heap(heap.begin(), heap.end());
      }
    }
    return;
  }
  const double gl = box_gap2(nodes_[node.left], q);
  const double gr = box_gap2(nodes_[node.right], q);
  if (gl <= gr) {
    nearest_rec(node.left, q, k, heap, skip);
    nearest_rec(node.right, q, k, heap, skip);
  } else {
    nearest_rec(node.right, q, k, heap, skip);
    nearest_rec(node.left, q, k, heap, skip);
  }
}

// ---------------------------------------------------------------------------
// NeighborIndex

bool NeighborSet::contains(std::uint32_t index) const {
  return std::any_of(items.begin(), items.end(), [&](const Neighbor& n) { return n.index == index; });
}

NeighborIndex::NeighborIndex(const std::vector<Point>& points, const CostModel& model)
    : points_(points), model_(model), memo_(points.size()), known_costs_(points.size()) {
  if (points_.empty()) throw InputError("neighbor index needs at least one point");
  const int d = static_cast<int>(points_.front().dim());
  lower_factor_ = model_.embedding_lower_bound_factor();
  if (!(lower_factor_ > 0.0)) throw ModelError("neighbor search needs f_lower > 0");
  std::vector<double> coords;
  coords.reserve(points_.size() * d);
  std::vector<double> e;
  for (const Point& p : points_) {
    if (static_cast<int>(p.dim()) != d) throw InputError("neighbor index dimension mismatch");
    embed(p, e);
    coords.insert(coords.end(), e.begin(), e.end());
  }
  std::vector<std::uint32_t> ids(points_.size());
  std::iota(ids.begin(), ids.end(), 0u);
  std::vector<double> periods(d, 0.0);
  for (int i = 0; i < d; ++i) {
    if (model_.embedding_wrapped(i)) periods[i] = model_.embedding_scale(i);
  }
  tree_ = KdTree(d, std::move(coords), std::move(ids), std::move(periods));
}

void NeighborIndex::embed(PointView x, std::vector<double>& out) const {
  out.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] * model_.embedding_scale(i);
}

const NeighborSet* NeighborIndex::find(std::uint32_t v, Kind kind, double r, std::size_t k) const {
  for (const Entry& e : memo_[v]) {
    if (e.kind == kind && e.r == r && e.k == k) return e.set.get();
  }
  return nullptr;
}

const NeighborSet& NeighborIndex::store(std::uint32_t v, Kind kind, double r, std::size_t k, NeighborSet set) {
  memo_[v].push_back(Entry{kind, r, k, std::make_unique<NeighborSet>(std::move(set))});
  return *memo_[v].back().set;
}

double NeighborIndex::cost_between(std::uint32_t v, std::uint32_t u) {
  const auto& known = known_costs_[u];
  const auto it = std::lower_bound(known.begin(), known.end(), std::pair<std::uint32_t, double>{v, -1.0});
  if (it != known.end() && it->first == v) return it->second;
  ++cost_evaluations_;
  return model_.pair_cost(points_[v], points_[u]);
}

NeighborSet NeighborIndex::compute_radius(std::uint32_t v, double r) {
  ++near_computations_;
  std::vector<double> q;
  embed(points_[v], q);
  std::vector<std::uint32_t> candidates;
  const double search = widen(r, lower_factor_);
  tree_.within(q, search * search, candidates);

  NeighborSet set;
  std::vector<std::pair<std::uint32_t, double>> costs;
  costs.reserve(candidates.size());
  for (std::uint32_t u : candidates) {
    if (u == v) continue;
    const double c = cost_between(v, u);
    costs.emplace_back(u, c);
    if (c < r) set.items.push_back({u, c});
  }
  std::sort(set.items.begin(), set.items.end(), neighbor_less);

  std::sort(costs.begin(), costs.end());
  auto& known = known_costs_[v];
  std::vector<std::pair<std::uint32_t, double>> merged;
  merged.reserve(known.size() + costs.size());
  std::merge(known.begin(), known.end(), costs.begin(), costs.end(), std::back_inserter(merged),
             [](const auto& a, const auto& b) { return a.first < b.first; });
  merged.erase(std::unique(merged.begin(), merged.end(), [](const auto& a, const auto& b) { return a.first == b.first; }),
               merged.end());
  known = std::move(merged);
  return set;
}

NeighborSet NeighborIndex::compute_knn(std::uint32_t v, std::size_t k) {
  const std::size_t others = points_.size() - 1;
  if (k >= others) {
    // Everything qualifies; a radius query covering the whole cube does the bookkeeping.
    NeighborSet all = compute_radius(v, std::numeric_limits<double>::infinity());
    all.truncated = k > others;
    return all;
  }
  ++near_computations_;
  std::vector<double> q;
  embed(points_[v], q);
  std::vector<std::pair<double, std::uint32_t>> first;
  tree_.nearest(q, k, first, v);
  std::unordered_map<std::uint32_t, double> seen;
  double bound = 0.0;
  for (const auto& [d2, u] : first) {
    const double c = cost_between(v, u);
    seen.emplace(u, c);
    bound = std::max(bound, c);
  }

  // Every node at least as cheap as the k-th candidate lies inside this ball.
  std::vector<std::uint32_t> candidates;
  const double search = widen(bound, lower_factor_);
  tree_.within(q, search * search, candidates);
  NeighborSet set;
  std::vector<std::pair<std::uint32_t, double>> costs;
  for (std::uint32_t u : candidates) {
    if (u == v) continue;
    const auto hit = seen.find(u);
    const double c = hit != seen.end() ? hit->second : cost_between(v, u);
    costs.emplace_back(u, c);
    set.items.push_back({u, c});
  }
  std::sort(set.items.begin(), set.items.end(), neighbor_less);
  if (set.items.size() > k) set.items.resize(k);

  std::sort(costs.begin(), costs.end());
  auto& known = known_costs_[v];
  std::vector<std::pair<std::uint32_t, double>> merged;
  std::merge(known.begin(), known.end(), costs.begin(), costs.end(), std::back_inserter(merged),
             [](const auto& a, const auto& b) { return a.first < b.first; });
  merged.erase(std::unique(merged.begin(), merged.end(), [](const auto& a, const auto& b) { return a.first == b.first; }),
               merged.end());
  known = std::move(merged);
  return set;
}

const NeighborSet& NeighborIndex::radius(std::uint32_t v, double r) {
  if (v >= points_.size()) throw InputError("node index out of range");
  if (!(r > 0.0)) throw InputError("radius must be positive");
  std::lock_guard lock(mutex_);
  if (const NeighborSet* hit = find(v, Kind::kRadius, r, 0)) return *hit;
  return store(v, Kind::kRadius, r, 0, compute_radius(v, r));
}

const NeighborSet& NeighborIndex::knn_locked(std::uint32_t v, std::size_t k) {
  if (const NeighborSet* hit = find(v, Kind::kKnn, 0.0, k)) return *hit;
  return store(v, Kind::kKnn, 0.0, k, compute_knn(v, k));
}

const NeighborSet& NeighborIndex::knn(std::uint32_t v, std::size_t k) {
  if (v >= points_.size()) throw InputError("node index out of range");
  if (k == 0) throw InputError("k must be positive");
  std::lock_guard lock(mutex_);
  return knn_locked(v, k);
}

const NeighborSet& NeighborIndex::mutual_knn(std::uint32_t v, std::size_t k) {
  if (v >= points_.size()) throw InputError("node index out of range");
  if (k == 0) throw InputError("k must be positive");
  std::lock_guard lock(mutex_);
  if (const NeighborSet* hit = find(v, Kind::kMutual, 0.0, k)) return *hit;
  const NeighborSet& mine = knn_locked(v, k);
  NeighborSet set;
  set.truncated = mine.truncated;
  for (const Neighbor& n : mine) {
    const NeighborSet& theirs = knn_locked(n.index, k);
    // v is in theirs iff it sorts no later than their last entry.
    const bool mutual = theirs.size() < k || !neighbor_less(theirs.items.back(), Neighbor{v, n.cost});
    if (mutual) set.items.push_back(n);
  }
  return store(v, Kind::kMutual, 0.0, k, std::move(set));
}

// ---------------------------------------------------------------------------
// IncrementalIndex

IncrementalIndex::IncrementalIndex(const CostModel& model, int dim)
    : model_(model), dim_(dim), lower_factor_(model.embedding_lower_bound_factor()), periods_(dim, 0.0) {
  if (!(lower_factor_ > 0.0)) throw ModelError("neighbor search needs f_lower > 0");
  for (int i = 0; i < dim; ++i) {
    if (model_.embedding_wrapped(i)) periods_[i] = model_.embedding_scale(i);
  }
}

void IncrementalIndex::embed(PointView x, std::vector<double>& out) const {
  out.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] * model_.embedding_scale(i);
}

std::uint32_t IncrementalIndex::insert(const Point& x) {
  if (static_cast<int>(x.dim()) != dim_) throw InputError("incremental index dimension mismatch");
  const auto id = static_cast<std::uint32_t>(points_.size());
  points_.push_back(x);
  std::vector<double> e;
  embed(x, e);
  embedded_.insert(embedded_.end(), e.begin(), e.end());

  std::vector<std::uint32_t> carry = {id};
  std::size_t level = 0;
  for (;; ++level) {
    if (level == levels_.size()) levels_.emplace_back();
    if (!levels_[level]) break;
    const auto& ids = levels_[level]->ids();
    carry.insert(carry.end(), ids.begin(), ids.end());
    levels_[level].reset();
  }
  std::sort(carry.begin(), carry.end());
  std::vector<double> coords;
  coords.reserve(carry.size() * dim_);
  for (std::uint32_t c : carry) coords.insert(coords.end(), embedded_.begin() + c * dim_, embedded_.begin() + (c + 1) * dim_);
  levels_[level] = std::make_unique<KdTree>(dim_, std::move(coords), std::move(carry), periods_);
  return id;
}

std::vector<Neighbor> IncrementalIndex::knn(PointView q, std::size_t k) {
  std::vector<Neighbor> out;
  if (k == 0 || points_.empty()) return out;
  std::vector<double> e;
  embed(q, e);
  std::unordered_map<std::uint32_t, double> seen;
  auto cost_to = [&](std::uint32_t u) {
    const auto [it, fresh] = seen.try_emplace(u, 0.0);
    if (fresh) {
      ++cost_evaluations_;
      it->second = model_.pair_cost(q, points_[u]);
    }
    return it->second;
  };
  if (k >= points_.size()) {
    for (std::uint32_t u = 0; u < points_.size(); ++u) out.push_back({u, cost_to(u)});
    std::sort(out.begin(), out.end(), neighbor_less);
    return out;
  }
  std::vector<std::pair<double, std::uint32_t>> first;
  std::vector<std::pair<double, std::uint32_t>> part;
  for (const auto& level : levels_) {
    if (!level) continue;
    level->nearest(e, k, part);
    first.insert(first.end(), part.begin(), part.end());
  }
  std::sort(first.begin(), first.end());
  first.resize(k);
  double bound = 0.0;
  for (const auto& [d2, u] : first) bound = std::max(bound, cost_to(u));

  std::vector<std::uint32_t> candidates;
  const double search = widen(bound, lower_factor_);
  for (const auto& level : levels_) {
    if (level) level->within(e, search * search, candidates);
  }
  for (std::uint32_t u : candidates) out.push_back({u, cost_to(u)});
  std::sort(out.begin(), out.end(), neighbor_less);
  if (out.size() > k) out.resize(k);
  return out;
}

}  // namespace fmtstar
