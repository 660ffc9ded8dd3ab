#pragma once

#include <cmath>
#include <cstdint>
#include <utility>
#include <variant>
#include <vector>

#include "fmtstar/geometry.hpp"

namespace fmtstar {

// Builtin scalar fields for line-integral costs.

struct ConstantField {
  double value = 1.0;
};

/// Piecewise constant: `base` everywhere, `value` inside each box. Later
/// regions take precedence where boxes overlap.
struct BoxRegionField {
  struct Region {
    Aabb box;
    double value;
  };
  double base = 1.0;
  std::vector<Region> regions;
};

/// base + scale / (|x - center| + softening); largest at the center.
struct RadialField {
  Point center;
  double base = 1.0;
  double scale = 0.1;
  double softening = 0.05;
};

/// offset + gradient . x
struct AffineField {
  double offset = 0.0;
  std::vector<double> gradient;
};

using Field = std::variant<ConstantField, BoxRegionField, RadialField, AffineField>;

double evaluate(const Field& field, PointView x);
bool is_piecewise_constant(const Field& field);
/// Segment parameters in (0,1) where the field may jump along a -> b, sorted.
std::vector<double> discontinuities(const Field& field, PointView a, PointView b);

struct QuadratureRule {
  enum class Kind { kFixedGauss, kAdaptiveSimpson };
  Kind kind = Kind::kAdaptiveSimpson;
  int points = 5;            // fixed-gauss nodes per piece
  double tolerance = 1e-8;   // adaptive-simpson absolute tolerance

  static QuadratureRule gauss(int points) { return {Kind::kFixedGauss, points, 0.0}; }
  static QuadratureRule simpson(double tolerance) { return {Kind::kAdaptiveSimpson, 0, tolerance}; }
};

/// Gauss-Legendre nodes and weights on [-1, 1].
std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int points);

/// Adaptive Simpson quadrature of a scalar function on [a, b].
template <typename F>
double adaptive_simpson(F&& f, double a, double b, double tolerance);

/// Pair cost for straight-line connections: Euclidean length, an axis-weighted
/// metric with optional wraparound axes, or the line integral of a field.
class CostModel {
 public:
  enum class Kind { kEuclidean, kWeighted, kLineIntegral };

  CostModel() = default;
  static CostModel euclidean();
  static CostModel weighted(std::vector<double> weights, std::vector<bool> wrap = {});
  static CostModel line_integral(Field field, double f_lower, double f_upper,
                                 QuadratureRule rule = {});

  Kind kind() const { return kind_; }
  bool is_metric() const { return kind_ != Kind::kLineIntegral; }

  const std::vector<double>& weights() const { return weights_; }
  const std::vector<bool>& wrap() const { return wrap_; }
  const Field& field() const { return field_; }
  double f_lower() const { return f_lower_; }
  double f_upper() const { return f_upper_; }
  const QuadratureRule& quadrature() const { return rule_; }

  /// Checks the model against dimension `d`; throws InputError/ModelError.
  void validate(int d) const;

  double pair_cost(PointView u, PointView v) const;

  /// Point at parameter t on the straight connection (shorter arc on wrapped axes).
  Point interpolate(PointView u, PointView v, double t) const;

  /// The connection u -> v as ordinary segments inside the cube; more than
  /// one piece only when it crosses a wrapped axis.
  std::vector<std::pair<Point, Point>> straight_pieces(PointView u, PointView v) const;

  // Neighbor-search embedding: points are mapped to x_i * scale_i with period
  // scale_i on wrapped axes. For metric models the embedded Euclidean distance
  // equals the cost; for line integrals cost >= f_lower * euclidean distance.
  double embedding_scale(std::size_t axis) const;
  bool embedding_wrapped(std::size_t axis) const;
  double embedding_lower_bound_factor() const;
  bool embedding_exact() const { return is_metric(); }

 private:
  double line_integral_cost(PointView u, PointView v) const;
  double checked(double value) const;

  Kind kind_ = Kind::kEuclidean;
  std::vector<double> weights_;
  std::vector<bool> wrap_;
  Field field_ = ConstantField{};
  double f_lower_ = 1.0;
  double f_upper_ = 1.0;
  QuadratureRule rule_;
};

inline double pair_cost(const CostModel& model, PointView u, PointView v) {
  return model.pair_cost(u, v);
}

struct BallVolumeMethod {
  enum class Kind { kClosedForm, kMonteCarlo };
  Kind kind = Kind::kClosedForm;
  std::uint64_t samples = 1000000;
  std::uint64_t seed = 0;
};

/// Lebesgue measure of the unit cost ball {x : dist(0, x) < 1}.
double metric_ball_volume(const CostModel& model, int d, const BallVolumeMethod& method = {});

// ---------------------------------------------------------------------------

namespace detail {
template <typename F>
double simpson_step(F& f, double a, double b, double fa, double fm, double fb, double whole,
                    double tolerance, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tolerance) return left + right + delta / 15.0;
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tolerance, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tolerance, depth - 1);
}
}  // namespace detail

template <typename F>
double adaptive_simpson(F&& f, double a, double b, double tolerance) {
  // Four initial panels so symmetric integrands cannot fool the first test.
  constexpr int kPanels = 4;
  const double h = (b - a) / kPanels;
  double total = 0.0;
  double x0 = a;
  double f0 = f(a);
  for (int i = 0; i < kPanels; ++i) {
    const double x1 = (i + 1 == kPanels) ? b : a + (i + 1) * h;
    const double f1 = f(x1);
    const double fm = f(0.5 * (x0 + x1));
    const double whole = (x1 - x0) / 6.0 * (f0 + 4.0 * fm + f1);
    total += detail::simpson_step(f, x0, x1, f0, fm, f1, whole, tolerance / kPanels, 40);
    x0 = x1;
    f0 = f1;
  }
  return total;
}

}  // namespace fmtstar
