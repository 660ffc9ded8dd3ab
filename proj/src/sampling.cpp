#include "fmtstar/sampling.hpp"

#include <cmath>
#include <string>

#include "fmtstar/errors.hpp"
#include "fmtstar/rng.hpp"

namespace fmtstar {

namespace {

class FreeProposer {
 public:
  FreeProposer(const World& world, std::uint64_t seed, std::uint64_t stream)
      : world_(world), rng_(seed, stream), x_(world.dim()) {}

  const Point& next() {
    for (;;) {
      for (int i = 0; i < world_.dim(); ++i) x_[i] = rng_.uniform();
      ++attempts_;
      if (world_.point_free(x_)) {
        ++accepted_;
        return x_;
      }
      check();
    }
  }

  Rng& rng() { return rng_; }

  void check() const {
    if (attempts_ >= kRejectionWindow &&
        static_cast<double>(accepted_) < kMinAcceptance * static_cast<double>(attempts_)) {
      throw SpecError("free-space rejection sampling acceptance below 1e-4; world is degenerate");
    }
  }

 private:
  const World& world_;
  Rng rng_;
  Point x_;
  std::uint64_t attempts_ = 0;
  std::uint64_t accepted_ = 0;
};

// Measure of box intersect X_free.
double free_measure_in(const Aabb& box, const World& world) {
  if (obstacles_disjoint(world.obstacles())) {
    double v = box.volume();
    for (const Aabb& o : world.obstacles()) v -= box.overlap_volume(o);
    return std::max(v, 0.0);
  }
  Rng rng(0, streams::kMeasure);
  const std::uint64_t samples = 1000000;
  Point x(world.dim());
  std::uint64_t hits = 0;
  for (std::uint64_t s = 0; s < samples; ++s) {
    for (int i = 0; i < world.dim(); ++i) x[i] = rng.uniform(box.lo[i], box.hi[i]);
    if (world.point_free(x)) ++hits;
  }
  return box.volume() * static_cast<double>(hits) / samples;
}

// weight_k * mu_free / mu(box_k intersect X_free) for each component.
std::vector<double> component_scales(const DensitySpec& spec, const World& world) {
  std::vector<double> scale;
  for (const auto& c : spec.components) {
    const double m = free_measure_in(c.box, world);
    if (c.weight > 0.0 && !(m > 0.0)) throw SpecError("density component has no free volume");
    scale.push_back(m > 0.0 ? c.weight * world.mu_free() / m : 0.0);
  }
  return scale;
}

double mixture_value(const DensitySpec& spec, const std::vector<double>& scale, PointView x) {
  double r = spec.uniform_weight;
  for (std::size_t k = 0; k < spec.components.size(); ++k) {
    if (spec.components[k].box.contains(x)) r += scale[k];
  }
  return r;
}

SampleSet start_set(PointView x_init, std::uint64_t seed, std::size_t n) {
  SampleSet set;
  set.seed = seed;
  set.points.reserve(n + 1);
  set.points.emplace_back(x_init);
  set.goal_sample.push_back(false);
  return set;
}

}  // namespace

SampleSet sample_free(std::size_t n, const World& world, PointView x_init, std::uint64_t seed) {
  if (static_cast<int>(x_init.size()) != world.dim()) throw InputError("x_init dimension mismatch");
  SampleSet set = start_set(x_init, seed, n);
  if (n == 0) return set;
  if (!(world.mu_free() > 0.0)) throw SpecError("free space has zero measure");
  FreeProposer proposer(world, seed, streams::kFreeSamples);
  for (std::size_t i = 0; i < n; ++i) {
    set.points.push_back(proposer.next());
    set.goal_sample.push_back(false);
  }
  return set;
}

double relative_density(const DensitySpec& spec, const World& world, PointView x) {
  if (!world.point_free(x)) return 0.0;
  if (spec.is_uniform()) return 1.0;
  return mixture_value(spec, component_scales(spec, world), x);
}

SampleSet sample_density(std::size_t n, const DensitySpec& spec, const World& world, PointView x_init,
                         std::uint64_t seed) {
  if (spec.is_uniform()) return sample_free(n, world, x_init, seed);
  if (!(spec.ell > 0.0 && spec.ell <= 1.0)) throw SpecError("density lower bound ell must lie in (0, 1]");
  if (!(spec.envelope >= 1.0)) throw SpecError("density envelope must be at least 1");

  const std::vector<double> scale = component_scales(spec, world);

  SampleSet set = start_set(x_init, seed, n);
  set.radius_multiplier = std::pow(1.0 / spec.ell, 1.0 / world.dim());
  if (n == 0) return set;
  FreeProposer proposer(world, seed, streams::kFreeSamples);
  while (set.n() < n) {
    const Point& x = proposer.next();
    const double value = mixture_value(spec, scale, x);
    if (value > spec.envelope * (1.0 + 1e-12)) {
      throw SpecError("density value " + std::to_string(value) + " exceeds declared envelope " +
                      std::to_string(spec.envelope));
    }
    if (proposer.rng().uniform() * spec.envelope < value) {
      set.points.push_back(x);
      set.goal_sample.push_back(false);
    }
  }
  return set;
}

void validate_density(const DensitySpec& spec, const World& world, std::uint64_t samples) {
  if (spec.is_uniform()) return;
  double total = spec.uniform_weight;
  if (spec.uniform_weight < 0.0) throw SpecError("negative uniform weight");
  for (const auto& c : spec.components) {
    if (c.weight < 0.0) throw SpecError("negative component weight");
    total += c.weight;
  }
  if (std::abs(total - 1.0) > 1e-9) throw SpecError("mixture weights must sum to 1");
  if (!(spec.ell > 0.0)) throw SpecError("density lower bound ell must be positive");

  const std::vector<double> scale = component_scales(spec, world);
  FreeProposer proposer(world, 0, streams::kValidation);
  double sum = 0.0;
  for (std::uint64_t s = 0; s < samples; ++s) {
    const Point& x = proposer.next();
    const double rho = mixture_value(spec, scale, x);
    if (rho < spec.ell - 1e-12) throw SpecError("density falls below declared ell");
    if (rho > spec.envelope + 1e-12) throw SpecError("density exceeds declared envelope");
    sum += rho;
  }
  const double mean = sum / static_cast<double>(samples);
  if (std::abs(mean - 1.0) > 0.01) {
    throw SpecError("density integrates to " + std::to_string(mean) + " over free space, not 1");
  }
}

void append_goal_samples(SampleSet& set, const GoalRegion& goal, const World& world, std::size_t count,
                         std::uint64_t seed) {
  if (count == 0) return;
  const Aabb bounds = goal.bounds();
  Rng rng(seed, streams::kGoalSamples);
  Point x(world.dim());
  std::uint64_t attempts = 0;
  std::size_t added = 0;
  while (added < count) {
    for (int i = 0; i < world.dim(); ++i) x[i] = rng.uniform(bounds.lo[i], bounds.hi[i]);
    if (++attempts > kRejectionWindow && added == 0) {
      throw SpecError("goal region has no reachable free volume for goal samples");
    }
    if (!goal.contains(x) || !world.point_free(x)) continue;
    set.points.push_back(x);
    set.goal_sample.push_back(true);
    ++added;
  }
}

SampleSet sample_problem(const ProblemDef& problem, std::size_t n, std::size_t goal_samples, std::uint64_t seed) {
  const std::size_t g = std::min(goal_samples, n);
  SampleSet set = sample_density(n - g, problem.sampling, problem.world, problem.x_init, seed);
  append_goal_samples(set, problem.goal, problem.world, g, seed);
  return set;
}

}  // namespace fmtstar
