#include "fmtstar/costs.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "fmtstar/errors.hpp"
#include "fmtstar/rng.hpp"

namespace fmtstar {

namespace {

constexpr double kBoundSlack = 1e-12;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// Shorter signed displacement on a unit-period axis.
double wrapped_delta(double from, double to) {
  double d = to - from;
  d -= std::round(d);
  return d;
}

bool lexicographically_less(PointView a, PointView b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

// Parameters where segment a->b enters and leaves the closed box, if it does.
void clip_params(const Aabb& box, PointView a, PointView b, std::vector<double>& out) {
  double t0 = 0.0;
  double t1 = 1.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double dir = b[i] - a[i];
    if (dir == 0.0) {
      if (a[i] < box.lo[i] || a[i] > box.hi[i]) return;
      continue;
    }
    double ta = (box.lo[i] - a[i]) / dir;
    double tb = (box.hi[i] - a[i]) / dir;
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
    if (t0 > t1) return;
  }
  if (t0 > 0.0 && t0 < 1.0) out.push_back(t0);
  if (t1 > 0.0 && t1 < 1.0) out.push_back(t1);
}

}  // namespace

double evaluate(const Field& field, PointView x) {
  return std::visit(
      Overloaded{
          [](const ConstantField& f) { return f.value; },
          [&](const BoxRegionField& f) {
            double v = f.base;
            for (const auto& region : f.regions) {
              if (region.box.contains(x)) v = region.value;
            }
            return v;
          },
          [&](const RadialField& f) { return f.base + f.scale / (distance(x, f.center) + f.softening); },
          [&](const AffineField& f) {
            double v = f.offset;
            for (std::size_t i = 0; i < f.gradient.size(); ++i) v += f.gradient[i] * x[i];
            return v;
          },
      },
      field);
}

bool is_piecewise_constant(const Field& field) {
  return std::holds_alternative<ConstantField>(field) || std::holds_alternative<BoxRegionField>(field);
}

std::vector<double> discontinuities(const Field& field, PointView a, PointView b) {
  std::vector<double> ts;
  if (const auto* boxes = std::get_if<BoxRegionField>(&field)) {
    for (const auto& region : boxes->regions) clip_params(region.box, a, b, ts);
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  }
  return ts;
}

std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int points) {
  if (points < 1 || points > 64) throw InputError("gauss-legendre supports 1..64 points");
  std::vector<double> nodes(points);
  std::vector<double> weights(points);
  for (int i = 0; i < points; ++i) {
    // Newton iteration on P_n from the Chebyshev-like initial guess.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (points + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= points; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (points == 1) {
        p1 = x;
        p0 = 1.0;
      }
      dp = points * (x * p1 - p0) / (x * x - 1.0);
      const double step = p1 / dp;
      x -= step;
      if (std::abs(step) < 1e-16) break;
    }
    nodes[i] = x;
    weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return {nodes, weights};
}

CostModel CostModel::euclidean() { return CostModel{}; }

CostModel CostModel::weighted(std::vector<double> weights, std::vector<bool> wrap) {
  CostModel m;
  m.kind_ = Kind::kWeighted;
  if (wrap.empty()) wrap.assign(weights.size(), false);
  m.weights_ = std::move(weights);
  m.wrap_ = std::move(wrap);
  for (double w : m.weights_) {
    if (!(w > 0.0) || !std::isfinite(w)) throw ModelError("metric weights must be positive and finite");
  }
  if (m.wrap_.size() != m.weights_.size()) throw ModelError("wrap flags must match weights");
  return m;
}

CostModel CostModel::line_integral(Field field, double f_lower, double f_upper, QuadratureRule rule) {
  CostModel m;
  m.kind_ = Kind::kLineIntegral;
  m.field_ = std::move(field);
  m.f_lower_ = f_lower;
  m.f_upper_ = f_upper;
  m.rule_ = rule;
  if (!(f_lower >= 0.0) || !(f_upper >= f_lower) || !std::isfinite(f_upper) || !(f_upper > 0.0)) {
    throw ModelError("line-integral bounds must satisfy 0 <= f_lower <= f_upper < inf");
  }
  if (rule.kind == QuadratureRule::Kind::kAdaptiveSimpson && !(rule.tolerance > 0.0)) {
    throw ModelError("quadrature tolerance must be positive");
  }
  if (rule.kind == QuadratureRule::Kind::kFixedGauss && (rule.points < 1 || rule.points > 64)) {
    throw ModelError("gauss rule needs 1..64 points");
  }
  return m;
}

void CostModel::validate(int d) const {
  if (kind_ == Kind::kWeighted && static_cast<int>(weights_.size()) != d) {
    throw InputError("metric weights do not match the world dimension");
  }
  if (kind_ != Kind::kLineIntegral) return;
  std::visit(Overloaded{
                 [](const ConstantField&) {},
                 [&](const BoxRegionField& f) {
                   for (const auto& r : f.regions) {
                     if (static_cast<int>(r.box.dim()) != d) throw InputError("field region dimension mismatch");
                   }
                 },
                 [&](const RadialField& f) {
                   if (static_cast<int>(f.center.dim()) != d) throw InputError("radial field center dimension");
                   if (!(f.softening > 0.0)) throw ModelError("radial field softening must be positive");
                 },
                 [&](const AffineField& f) {
                   if (static_cast<int>(f.gradient.size()) != d) throw InputError("affine gradient dimension");
                 },
             },
             field_);
  // Spot-check the declared bounds on random points of the cube.
  Rng rng(0, streams::kValidation);
  Point x(d);
  for (int s = 0; s < 1000; ++s) {
    for (int i = 0; i < d; ++i) x[i] = rng.uniform();
    (void)checked(evaluate(field_, x));
  }
}

double CostModel::checked(double value) const {
  if (!(value >= f_lower_ - kBoundSlack) || !(value <= f_upper_ + kBoundSlack)) {
    throw ModelError("field value " + std::to_string(value) + " outside declared bounds [" +
                     std::to_string(f_lower_) + ", " + std::to_string(f_upper_) + "]");
  }
  return value;
}

double CostModel::pair_cost(PointView u, PointView v) const {
  if (u.size() != v.size()) throw InputError("pair_cost dimension mismatch");
  switch (kind_) {
    case Kind::kEuclidean:
      return distance(u, v);
    case Kind::kWeighted: {
      if (weights_.size() != u.size()) throw InputError("pair_cost dimension mismatch");
      double s = 0.0;
      for (std::size_t i = 0; i < u.size(); ++i) {
        const double d = wrap_[i] ? wrapped_delta(u[i], v[i]) : v[i] - u[i];
        s += weights_[i] * weights_[i] * d * d;
      }
      return std::sqrt(s);
    }
    case Kind::kLineIntegral:
      // Canonical orientation keeps the numerical result exactly symmetric.
      return lexicographically_less(v, u) ? line_integral_cost(v, u) : line_integral_cost(u, v);
  }
  return 0.0;
}

double CostModel::line_integral_cost(PointView u, PointView v) const {
  const double length = distance(u, v);
  if (length == 0.0) return 0.0;
  std::vector<double> cuts = discontinuities(field_, u, v);
  cuts.insert(cuts.begin(), 0.0);
  cuts.push_back(1.0);

  Point x(u.size());
  auto integrand = [&](double t) {
    for (std::size_t i = 0; i < u.size(); ++i) x[i] = u[i] + t * (v[i] - u[i]);
    return checked(evaluate(field_, x));
  };

  double total = 0.0;
  const bool exact = is_piecewise_constant(field_);
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double a = cuts[k];
    const double b = cuts[k + 1];
    if (b <= a) continue;
    if (exact) {
      total += integrand(0.5 * (a + b)) * (b - a);
    } else if (rule_.kind == QuadratureRule::Kind::kAdaptiveSimpson) {
      total += adaptive_simpson(integrand, a, b, rule_.tolerance / length);
    } else {
      const auto [nodes, weights] = gauss_legendre(rule_.points);
      const double half = 0.5 * (b - a);
      const double mid = 0.5 * (a + b);
      for (std::size_t q = 0; q < nodes.size(); ++q) total += weights[q] * half * integrand(mid + half * nodes[q]);
    }
  }
  return total * length;
}

Point CostModel::interpolate(PointView u, PointView v, double t) const {
  Point out(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    const bool wrapped = kind_ == Kind::kWeighted && wrap_[i];
    if (wrapped) {
      double c = u[i] + t * wrapped_delta(u[i], v[i]);
      c -= std::floor(c);
      out[i] = c;
    } else {
      out[i] = u[i] + t * (v[i] - u[i]);
    }
  }
  return out;
}

std::vector<std::pair<Point, Point>> CostModel::straight_pieces(PointView u, PointView v) const {
  const std::size_t d = u.size();
  const bool any_wrap = kind_ == Kind::kWeighted && std::find(wrap_.begin(), wrap_.end(), true) != wrap_.end();
  if (!any_wrap) return {{Point(u), Point(v)}};

  // Unwrapped end point and the parameters where wrapped axes cross 0 or 1.
  Point end(d);
  std::vector<double> ts = {0.0, 1.0};
  for (std::size_t i = 0; i < d; ++i) {
    if (!wrap_[i]) {
      end[i] = v[i];
      continue;
    }
    const double delta = wrapped_delta(u[i], v[i]);
    end[i] = u[i] + delta;
    if (delta != 0.0) {
      for (double boundary : {0.0, 1.0}) {
        const double t = (boundary - u[i]) / delta;
        if (t > 0.0 && t < 1.0) ts.push_back(t);
      }
    }
  }
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());

  std::vector<std::pair<Point, Point>> pieces;
  for (std::size_t k = 0; k + 1 < ts.size(); ++k) {
    Point a = lerp(u, end, ts[k]);
    Point b = lerp(u, end, ts[k + 1]);
    const Point mid = lerp(u, end, 0.5 * (ts[k] + ts[k + 1]));
    for (std::size_t i = 0; i < d; ++i) {
      if (!wrap_[i]) continue;
      const double shift = std::floor(mid[i]);
      a[i] = std::clamp(a[i] - shift, 0.0, 1.0);
      b[i] = std::clamp(b[i] - shift, 0.0, 1.0);
    }
    pieces.emplace_back(std::move(a), std::move(b));
  }
  return pieces;
}

double CostModel::embedding_scale(std::size_t axis) const {
  return kind_ == Kind::kWeighted ? weights_[axis] : 1.0;
}

bool CostModel::embedding_wrapped(std::size_t axis) const {
  return kind_ == Kind::kWeighted && wrap_[axis];
}

double CostModel::embedding_lower_bound_factor() const {
  return kind_ == Kind::kLineIntegral ? f_lower_ : 1.0;
}

double metric_ball_volume(const CostModel& model, int d, const BallVolumeMethod& method) {
  if (!model.is_metric()) {
    throw MethodError("unit cost-ball volume is undefined for line-integral costs; scale the radius by f_upper");
  }
  if (d < 1) throw InputError("dimension must be positive");
  if (model.kind() == CostModel::Kind::kWeighted && static_cast<int>(model.weights().size()) != d) {
    throw InputError("metric weights do not match dimension");
  }
  if (method.kind == BallVolumeMethod::Kind::kClosedForm) {
    double v = unit_ball_volume(d);
    if (model.kind() == CostModel::Kind::kWeighted) {
      for (double w : model.weights()) v /= w;
    }
    return v;
  }
  // Monte-carlo over the bounding box of the ball in each axis: |x_i| < 1 / w_i.
  Rng rng(method.seed, streams::kValidation);
  std::vector<double> half(d, 1.0);
  double box_volume = 1.0;
  for (int i = 0; i < d; ++i) {
    half[i] = 1.0 / model.embedding_scale(i);
    box_volume *= 2.0 * half[i];
  }
  const Point origin(d, 0.0);
  Point x(d);
  std::uint64_t inside = 0;
  for (std::uint64_t s = 0; s < method.samples; ++s) {
    double dist2 = 0.0;
    for (int i = 0; i < d; ++i) {
      x[i] = rng.uniform(-half[i], half[i]);
      const double w = model.embedding_scale(i);
      dist2 += w * w * x[i] * x[i];
    }
    if (dist2 < 1.0) ++inside;
  }
  return box_volume * static_cast<double>(inside) / static_cast<double>(method.samples);
}

}  // namespace fmtstar
