#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <utility>
#include <vector>

#include "fmtstar/costs.hpp"
#include "fmtstar/geometry.hpp"

namespace fmtstar {

/// Static kd-tree over points in R^d, optionally periodic per axis
/// (period > 0). Distances are Euclidean with wraparound on periodic axes.
class KdTree {
 public:
  KdTree() = default;
  /// `coords` is row-major, `ids` labels each point; `periods` has one entry
  /// per axis (0 = not periodic).
  KdTree(int dim, std::vector<double> coords, std::vector<std::uint32_t> ids, std::vector<double> periods);

  std::size_t size() const { return ids_.size(); }
  int dim() const { return dim_; }

  /// Appends ids with squared distance <= r2 to `out`.
  void within(PointView q, double r2, std::vector<std::uint32_t>& out) const;
  /// The k smallest (squared distance, id) pairs, ascending, excluding `skip`.
  void nearest(PointView q, std::size_t k, std::vector<std::pair<double, std::uint32_t>>& out,
               std::int64_t skip = -1) const;

  double squared_distance_to(PointView q, std::size_t slot) const;
  const std::vector<std::uint32_t>& ids() const { return ids_; }
  const double* coords(std::size_t slot) const { return coords_.data() + slot * dim_; }

 private:
  struct Node {
    std::uint32_t begin, end;  // slot range
    std::int32_t left = -1, right = -1;
    std::vector<double> lo, hi;  // tight bounds of the slot range
  };

  std::int32_t build(std::uint32_t begin, std::uint32_t end);
  double box_gap2(const Node& node, PointView q) const;
  void within_rec(std::int32_t node, PointView q, double r2, std::vector<std::uint32_t>& out) const;
  void nearest_rec(std::int32_t node, PointView q, std::size_t k, std::vector<std::pair<double, std::uint32_t>>& heap,
                   std::int64_t skip) const;

  int dim_ = 0;
  std::vector<double> coords_;
  std::vector<std::uint32_t> ids_;
  std::vector<double> periods_;
  std::vector<Node> nodes_;
  std::int32_t root_ = -1;
};

struct Neighbor {
  std::uint32_t index;
  double cost;  // pair cost to the query node
};

/// Neighbors sorted by (cost, index); the query node itself is excluded.
struct NeighborSet {
  std::vector<Neighbor> items;
  bool truncated = false;  // fewer than k others existed

  std::size_t size() const { return items.size(); }
  bool empty() const { return items.empty(); }
  auto begin() const { return items.begin(); }
  auto end() const { return items.end(); }
  const Neighbor& operator[](std::size_t i) const { return items[i]; }
  bool contains(std::uint32_t index) const;
};

/// Radius, k-nearest and mutual k-nearest queries over a fixed vertex set,
/// measured by the cost model's pair cost, with per-node memoization.
///
/// Results equal a brute-force scan exactly: the kd-tree searches an embedding
/// whose distance lower-bounds the cost, and candidates are filtered by the
/// exact pair cost. Memo entries are keyed by (node, radius) or (node, k).
class NeighborIndex {
 public:
  NeighborIndex(const std::vector<Point>& points, const CostModel& model);

  std::size_t size() const { return points_.size(); }
  const Point& point(std::size_t i) const { return points_[i]; }
  const CostModel& model() const { return model_; }

  /// All u != v with cost(u, v) < r.
  const NeighborSet& radius(std::uint32_t v, double r);
  /// The k cheapest other nodes, ties by index; truncated when k >= size().
  const NeighborSet& knn(std::uint32_t v, std::size_t k);
  /// {u in knn(v) : v in knn(u)}.
  const NeighborSet& mutual_knn(std::uint32_t v, std::size_t k);

  /// Fresh (non-memoized) radius and kNN computations.
  std::uint64_t near_computations() const { return near_computations_; }
  /// Pair costs evaluated; a pair already known from another node's set is reused.
  std::uint64_t cost_evaluations() const { return cost_evaluations_; }

 private:
  enum class Kind : std::uint8_t { kRadius, kKnn, kMutual };
  struct Entry {
    Kind kind;
    double r;
    std::size_t k;
    std::unique_ptr<NeighborSet> set;
  };

  const NeighborSet* find(std::uint32_t v, Kind kind, double r, std::size_t k) const;
  const NeighborSet& store(std::uint32_t v, Kind kind, double r, std::size_t k, NeighborSet set);
  double cost_between(std::uint32_t v, std::uint32_t u);
  void embed(PointView x, std::vector<double>& out) const;
  NeighborSet compute_radius(std::uint32_t v, double r);
  NeighborSet compute_knn(std::uint32_t v, std::size_t k);
  const NeighborSet& knn_locked(std::uint32_t v, std::size_t k);

  std::vector<Point> points_;
  CostModel model_;
  KdTree tree_;
  double lower_factor_ = 1.0;
  std::vector<std::vector<Entry>> memo_;
  // Costs already computed for each node, sorted by neighbor index.
  std::vector<std::vector<std::pair<std::uint32_t, double>>> known_costs_;
  std::recursive_mutex mutex_;
  std::uint64_t near_computations_ = 0;
  std::uint64_t cost_evaluations_ = 0;
};

/// Dynamic nearest-neighbor structure for tree-growing planners: a
/// logarithmic forest of static kd-trees rebuilt by binary-counter merging.
class IncrementalIndex {
 public:
  explicit IncrementalIndex(const CostModel& model, int dim);

  std::uint32_t insert(const Point& x);
  std::size_t size() const { return points_.size(); }
  const Point& point(std::size_t i) const { return points_[i]; }

  /// The k cheapest stored points to q by pair cost, ties by index.
  std::vector<Neighbor> knn(PointView q, std::size_t k);
  std::uint64_t cost_evaluations() const { return cost_evaluations_; }

 private:
  void embed(PointView x, std::vector<double>& out) const;

  CostModel model_;
  int dim_;
  double lower_factor_;
  std::vector<double> periods_;
  std::vector<Point> points_;
  std::vector<double> embedded_;
  std::vector<std::unique_ptr<KdTree>> levels_;  // level i holds 2^i points or is empty
  std::uint64_t cost_evaluations_ = 0;
};

}  // namespace fmtstar
