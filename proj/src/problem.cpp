#include "fmtstar/problem.hpp"

#include <cmath>
#include <fstream>

#include "fmtstar/errors.hpp"

namespace fmtstar {

using nlohmann::json;

namespace {

Point point_from_json(const json& j, int dim, const char* what) {
  if (!j.is_array() || static_cast<int>(j.size()) != dim) {
    throw InputError(std::string(what) + ": expected an array of " + std::to_string(dim) + " numbers");
  }
  Point p(dim);
  for (int i = 0; i < dim; ++i) {
    if (!j[i].is_number()) throw InputError(std::string(what) + ": non-numeric coordinate");
    p[i] = j[i].get<double>();
    if (!std::isfinite(p[i])) throw InputError(std::string(what) + ": coordinate not finite");
  }
  return p;
}

Aabb box_from_json(const json& j, int dim, const char* what) {
  if (!j.is_object() || !j.contains("min") || !j.contains("max")) {
    throw InputError(std::string(what) + ": box needs \"min\" and \"max\"");
  }
  return make_box(point_from_json(j["min"], dim, what), point_from_json(j["max"], dim, what));
}

json box_to_json(const Aabb& b) { return {{"min", b.lo.values()}, {"max", b.hi.values()}}; }

double number(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number()) throw InputError(std::string("\"") + key + "\" must be a number");
  return j[key].get<double>();
}

double required_number(const json& j, const char* key) {
  if (!j.contains(key)) throw InputError(std::string("missing \"") + key + "\"");
  return number(j, key, 0.0);
}

json field_to_json(const Field& field) {
  if (const auto* f = std::get_if<ConstantField>(&field)) return {{"name", "constant"}, {"value", f->value}};
  if (const auto* f = std::get_if<BoxRegionField>(&field)) {
    json regions = json::array();
    for (const auto& r : f->regions) {
      json b = box_to_json(r.box);
      b["value"] = r.value;
      regions.push_back(b);
    }
    return {{"name", "box_regions"}, {"base", f->base}, {"regions", regions}};
  }
  if (const auto* f = std::get_if<RadialField>(&field)) {
    return {{"name", "radial"},
            {"center", f->center.values()},
            {"base", f->base},
            {"scale", f->scale},
            {"softening", f->softening}};
  }
  const auto& f = std::get<AffineField>(field);
  return {{"name", "affine"}, {"offset", f.offset}, {"gradient", f.gradient}};
}

Field field_from_json(const json& j, int dim) {
  const std::string name = j.value("name", "");
  if (name == "constant") return ConstantField{number(j, "value", 1.0)};
  if (name == "box_regions") {
    BoxRegionField f;
    f.base = number(j, "base", 1.0);
    for (const auto& r : j.value("regions", json::array())) {
      f.regions.push_back({box_from_json(r, dim, "field region"), required_number(r, "value")});
    }
    return f;
  }
  if (name == "radial") {
    RadialField f;
    f.center = point_from_json(j.at("center"), dim, "radial center");
    f.base = number(j, "base", f.base);
    f.scale = number(j, "scale", f.scale);
    f.softening = number(j, "softening", f.softening);
    return f;
  }
  if (name == "affine") {
    AffineField f;
    f.offset = number(j, "offset", 0.0);
    f.gradient = point_from_json(j.at("gradient"), dim, "affine gradient").values();
    return f;
  }
  throw InputError("unknown field name \"" + name + "\"");
}

}  // namespace

GoalRegion GoalRegion::ball(Point center, double xi) {
  if (!(xi > 0.0)) throw InputError("goal radius must be positive");
  GoalRegion g;
  g.kind = Kind::kBall;
  g.center = std::move(center);
  g.xi = xi;
  return g;
}

GoalRegion GoalRegion::make_box(Aabb box) {
  for (std::size_t i = 0; i < box.dim(); ++i) {
    if (!(box.lo[i] < box.hi[i])) throw InputError("goal box must have positive extent");
  }
  GoalRegion g;
  g.kind = Kind::kBox;
  g.box = std::move(box);
  return g;
}

bool GoalRegion::contains(PointView x) const {
  if (kind == Kind::kBall) return squared_distance(x, center) < xi * xi;
  for (std::size_t i = 0; i < box.dim(); ++i) {
    if (!(x[i] > box.lo[i] && x[i] < box.hi[i])) return false;
  }
  return true;
}

bool GoalRegion::contains_closed(PointView x) const {
  if (kind == Kind::kBall) return distance(x, center) <= xi * (1.0 + 1e-12);
  return box.contains(x);
}

Aabb GoalRegion::bounds() const {
  if (kind == Kind::kBox) return box;
  Aabb b{Point(center.dim()), Point(center.dim())};
  for (std::size_t i = 0; i < center.dim(); ++i) {
    b.lo[i] = std::max(0.0, center[i] - xi);
    b.hi[i] = std::min(1.0, center[i] + xi);
  }
  return b;
}

void ProblemDef::validate() const {
  const int d = world.dim();
  if (d < 2) throw InputError("problem dimension must be at least 2");
  if (static_cast<int>(x_init.dim()) != d) throw InputError("x_init dimension mismatch");
  if (static_cast<int>(goal.dim()) != d) throw InputError("goal dimension mismatch");
  if (!world.point_free(x_init)) throw InputError("x_init is not in free space");
  cost.validate(d);
  if (sampling.kind == DensitySpec::Kind::kMixture) {
    for (const auto& c : sampling.components) {
      if (static_cast<int>(c.box.dim()) != d) throw InputError("density component dimension mismatch");
    }
  }
}

json to_json(const GoalRegion& goal) {
  if (goal.kind == GoalRegion::Kind::kBall) {
    return {{"kind", "ball"}, {"center", goal.center.values()}, {"xi", goal.xi}};
  }
  return {{"kind", "box"}, {"min", goal.box.lo.values()}, {"max", goal.box.hi.values()}};
}

GoalRegion goal_from_json(const json& j, int dim) {
  const std::string kind = j.value("kind", "ball");
  if (kind == "ball") return GoalRegion::ball(point_from_json(j.at("center"), dim, "goal center"), required_number(j, "xi"));
  if (kind == "box") return GoalRegion::make_box(box_from_json(j, dim, "goal box"));
  throw InputError("unknown goal kind \"" + kind + "\"");
}

json to_json(const CostModel& model) {
  switch (model.kind()) {
    case CostModel::Kind::kEuclidean:
      return {{"kind", "euclidean"}};
    case CostModel::Kind::kWeighted:
      return {{"kind", "weighted"}, {"weights", model.weights()}, {"wrap", model.wrap()}};
    case CostModel::Kind::kLineIntegral: {
      const auto& q = model.quadrature();
      json quad = q.kind == QuadratureRule::Kind::kFixedGauss ? json{{"kind", "gauss"}, {"points", q.points}}
                                                               : json{{"kind", "simpson"}, {"tolerance", q.tolerance}};
      return {{"kind", "field"},
              {"field", field_to_json(model.field())},
              {"f_lower", model.f_lower()},
              {"f_upper", model.f_upper()},
              {"quadrature", quad}};
    }
  }
  return {};
}

CostModel cost_from_json(const json& j, int dim) {
  const std::string kind = j.value("kind", "euclidean");
  if (kind == "euclidean") return CostModel::euclidean();
  if (kind == "weighted") {
    std::vector<double> weights = point_from_json(j.at("weights"), dim, "metric weights").values();
    std::vector<bool> wrap;
    if (j.contains("wrap")) {
      if (!j["wrap"].is_array() || static_cast<int>(j["wrap"].size()) != dim) throw InputError("wrap flags");
      for (const auto& w : j["wrap"]) wrap.push_back(w.get<bool>());
    }
    return CostModel::weighted(std::move(weights), std::move(wrap));
  }
  if (kind == "field") {
    QuadratureRule rule;
    if (j.contains("quadrature")) {
      const auto& q = j["quadrature"];
      if (q.value("kind", "simpson") == "gauss") rule = QuadratureRule::gauss(q.value("points", 5));
      else rule = QuadratureRule::simpson(q.value("tolerance", 1e-8));
    }
    return CostModel::line_integral(field_from_json(j.at("field"), dim), required_number(j, "f_lower"),
                                    required_number(j, "f_upper"), rule);
  }
  throw InputError("unknown cost kind \"" + kind + "\"");
}

json to_json(const DensitySpec& spec) {
  if (spec.is_uniform()) return {{"kind", "uniform"}};
  json comps = json::array();
  for (const auto& c : spec.components) {
    json b = box_to_json(c.box);
    b["weight"] = c.weight;
    comps.push_back(b);
  }
  return {{"kind", "mixture"},
          {"ell", spec.ell},
          {"envelope", spec.envelope},
          {"uniform_weight", spec.uniform_weight},
          {"components", comps}};
}

DensitySpec density_from_json(const json& j, int dim) {
  DensitySpec spec;
  const std::string kind = j.value("kind", "uniform");
  if (kind == "uniform") return spec;
  if (kind != "mixture") throw InputError("unknown sampling kind \"" + kind + "\"");
  spec.kind = DensitySpec::Kind::kMixture;
  spec.ell = required_number(j, "ell");
  spec.envelope = required_number(j, "envelope");
  spec.uniform_weight = required_number(j, "uniform_weight");
  for (const auto& c : j.value("components", json::array())) {
    spec.components.push_back({required_number(c, "weight"), box_from_json(c, dim, "density component")});
  }
  return spec;
}

json to_json(const ProblemDef& problem) {
  json obstacles = json::array();
  for (const auto& b : problem.world.obstacles()) obstacles.push_back(box_to_json(b));
  json j = {{"name", problem.name},
            {"dim", problem.dim()},
            {"obstacles", obstacles},
            {"x_init", problem.x_init.values()},
            {"goal", to_json(problem.goal)},
            {"cost", to_json(problem.cost)},
            {"sampling", to_json(problem.sampling)}};
  if (!problem.provenance.is_null()) j["provenance"] = problem.provenance;
  return j;
}

ProblemDef problem_from_json(const json& j) {
  try {
    if (!j.is_object()) throw InputError("problem must be a JSON object");
    if (!j.contains("dim") || !j["dim"].is_number_integer()) throw InputError("missing integer \"dim\"");
    const int d = j["dim"].get<int>();
    if (d < 2) throw InputError("\"dim\" must be at least 2");
    std::vector<Aabb> obstacles;
    for (const auto& o : j.value("obstacles", json::array())) obstacles.push_back(box_from_json(o, d, "obstacle"));

    ProblemDef p;
    p.name = j.value("name", "problem");
    p.world = World(d, std::move(obstacles));
    p.x_init = point_from_json(j.at("x_init"), d, "x_init");
    p.goal = goal_from_json(j.at("goal"), d);
    p.cost = j.contains("cost") ? cost_from_json(j["cost"], d) : CostModel::euclidean();
    if (j.contains("sampling")) p.sampling = density_from_json(j["sampling"], d);
    if (j.contains("provenance")) p.provenance = j["provenance"];
    p.validate();
    return p;
  } catch (const json::exception& e) {
    throw InputError(std::string("problem JSON: ") + e.what());
  }
}

ProblemDef load_problem(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open problem file " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw InputError("problem file " + path.string() + ": " + e.what());
  }
  return problem_from_json(j);
}

void save_problem(const ProblemDef& problem, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << to_json(problem).dump(2) << "\n";
}

}  // namespace fmtstar
