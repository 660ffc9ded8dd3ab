#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "fmtstar/costs.hpp"
#include "fmtstar/geometry.hpp"

namespace fmtstar {

/// Open goal region: a ball of radius xi or an axis-aligned box.
struct GoalRegion {
  enum class Kind { kBall, kBox };
  Kind kind = Kind::kBall;
  Point center;
  double xi = 0.0;
  Aabb box;

  static GoalRegion ball(Point center, double xi);
  static GoalRegion make_box(Aabb box);

  std::size_t dim() const { return kind == Kind::kBall ? center.dim() : box.dim(); }
  /// Strict membership in the open region.
  bool contains(PointView x) const;
  bool contains_closed(PointView x) const;
  /// Bounding box clipped to the unit cube.
  Aabb bounds() const;
};

/// Sampling density over the free space, expressed relative to the uniform
/// density 1/mu_free so that the uniform case has value 1 everywhere.
///
/// The mixture is uniform_weight * uniform(X_free) + sum_k weight_k *
/// uniform(box_k intersect X_free). `ell` and `envelope` are the declared lower
/// and upper bounds of that relative density.
struct DensitySpec {
  enum class Kind { kUniform, kMixture };
  struct Component {
    double weight = 0.0;
    Aabb box;
  };
  Kind kind = Kind::kUniform;
  double ell = 1.0;
  double envelope = 1.0;
  double uniform_weight = 1.0;
  std::vector<Component> components;

  bool is_uniform() const { return kind == Kind::kUniform; }
};

/// One planning query.
struct ProblemDef {
  std::string name = "problem";
  World world;
  Point x_init;
  GoalRegion goal;
  CostModel cost;
  DensitySpec sampling;
  nlohmann::json provenance;  // generator spec + seed, or null

  int dim() const { return world.dim(); }
  /// Dimension checks, x_init in free space, cost model and density sanity.
  void validate() const;
};

nlohmann::json to_json(const GoalRegion& goal);
GoalRegion goal_from_json(const nlohmann::json& j, int dim);
nlohmann::json to_json(const CostModel& model);
CostModel cost_from_json(const nlohmann::json& j, int dim);
nlohmann::json to_json(const DensitySpec& spec);
DensitySpec density_from_json(const nlohmann::json& j, int dim);

nlohmann::json to_json(const ProblemDef& problem);
/// Throws InputError on schema violations.
ProblemDef problem_from_json(const nlohmann::json& j);

ProblemDef load_problem(const std::filesystem::path& path);
void save_problem(const ProblemDef& problem, const std::filesystem::path& path);

}  // namespace fmtstar
