#include "fmtstar/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <istream>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include "fmtstar/environments.hpp"
#include "fmtstar/errors.hpp"

namespace fmtstar {

using nlohmann::json;

namespace {

bool sample_based(Algorithm a) { return a != Algorithm::kRrt; }

PlannerConfig planner_config_from_json(const json& j) {
  PlannerConfig c;
  if (j.contains("eta")) c.eta = j.at("eta").get<double>();
  if (j.contains("rm")) c.radius_multiplier = j.at("rm").get<double>();
  if (j.contains("radius")) c.radius_override = j.at("radius").get<double>();
  if (j.contains("k0")) c.k0 = j.at("k0").get<double>();
  if (j.contains("goal_samples")) c.goal_samples = j.at("goal_samples").get<std::size_t>();
  if (j.contains("cost_radius_factor")) {
    const auto f = j.at("cost_radius_factor").get<std::string>();
    if (f == "upper") {
      c.cost_radius_factor = PlannerConfig::CostRadiusFactor::kUpper;
    } else if (f == "upper_over_lower") {
      c.cost_radius_factor = PlannerConfig::CostRadiusFactor::kUpperOverLower;
    } else {
      throw InputError("unknown cost_radius_factor: " + f);
    }
  }
  if (j.contains("steer_fraction")) c.rrt.steer_fraction = j.at("steer_fraction").get<double>();
  if (j.contains("goal_bias")) c.rrt.goal_bias = j.at("goal_bias").get<double>();
  if (j.contains("rrt_k0")) c.rrt.k0 = j.at("rrt_k0").get<double>();
  c.validate();
  return c;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
  if (s.empty()) return std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw InputError("bad number in CSV: " + s);
  return v;
}

std::uint64_t parse_u64(const std::string& s) {
  std::uint64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw InputError("bad integer in CSV: " + s);
  return v;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

struct MeanErr {
  double mean = 0.0;
  double stderr_ = 0.0;
};

MeanErr mean_and_stderr(const std::vector<double>& v) {
  MeanErr m;
  if (v.empty()) return m;
  for (double x : v) m.mean += x;
  m.mean /= static_cast<double>(v.size());
  if (v.size() < 2) return m;
  double ss = 0.0;
  for (double x : v) ss += (x - m.mean) * (x - m.mean);
  m.stderr_ = std::sqrt(ss / static_cast<double>(v.size() - 1)) / std::sqrt(static_cast<double>(v.size()));
  return m;
}

}  // namespace

std::string algorithm_name(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kFmt: return "fmt";
    case Algorithm::kFmtKnn: return "fmt-knn";
    case Algorithm::kPrm: return "prm";
    case Algorithm::kRrt: return "rrt";
    case Algorithm::kDiskGraph: return "oracle";
  }
  return "";
}

Algorithm parse_algorithm(const std::string& name) {
  for (Algorithm a : {Algorithm::kFmt, Algorithm::kFmtKnn, Algorithm::kPrm, Algorithm::kRrt, Algorithm::kDiskGraph}) {
    if (algorithm_name(a) == name) return a;
  }
  throw InputError("unknown algorithm: " + name);
}

bool TrialRecord::same_outcome(const TrialRecord& other) const {
  TrialRecord a = *this;
  a.time_ms = other.time_ms;
  return a == other;
}

void SweepConfig::validate() const {
  if (algorithms.empty()) throw InputError("sweep needs at least one algorithm");
  if (sample_counts.empty()) throw InputError("sweep needs at least one sample count");
  if (trials < 1) throw InputError("trials must be positive");
  if (threads < 0) throw InputError("threads must be nonnegative");
  for (const auto& a : algorithms) a.config.validate();
  smoothing_params.validate();
  problem.validate();
}

ProblemDef generate_environment(const json& spec) {
  const std::string kind = spec.at("generator").get<std::string>();
  const std::uint64_t seed = spec.value("seed", std::uint64_t{0});
  if (kind == "maze") {
    MazeSpec m;
    m.dim = spec.value("dim", m.dim);
    m.wall_thickness = spec.value("wall_thickness", m.wall_thickness);
    m.corridor_fraction = spec.value("corridor_fraction", m.corridor_fraction);
    m.goal_radius = spec.value("goal_radius", m.goal_radius);
    return recursive_maze(m);
  }
  if (kind == "bugtrap") {
    BugTrapSpec b;
    b.mouth_width = spec.value("mouth_width", b.mouth_width);
    b.lip_depth = spec.value("lip_depth", b.lip_depth);
    b.wall_thickness = spec.value("wall_thickness", b.wall_thickness);
    b.outer_radius = spec.value("outer_radius", b.outer_radius);
    b.goal_radius = spec.value("goal_radius", b.goal_radius);
    return bug_trap_2d(b);
  }
  if (kind == "clutter") {
    ClutterSpec c;
    c.dim = spec.value("dim", c.dim);
    c.count = spec.value("count", c.count);
    c.coverage = spec.value("coverage", c.coverage);
    c.max_extent = spec.value("max_extent", c.max_extent);
    c.disjoint = spec.value("disjoint", c.disjoint);
    c.goal_radius = spec.value("goal_radius", c.goal_radius);
    const std::string vis = spec.value("visibility", std::string("any"));
    if (vis == "any") {
      c.visibility = ClutterSpec::Visibility::kAny;
    } else if (vis == "blocked") {
      c.visibility = ClutterSpec::Visibility::kBlocked;
    } else if (vis == "visible") {
      c.visibility = ClutterSpec::Visibility::kVisible;
    } else {
      throw InputError("unknown visibility: " + vis);
    }
    return random_clutter(c, seed);
  }
  if (kind == "costfield") {
    const std::string variant = spec.value("variant", std::string("block2"));
    if (variant == "block2") return cost_field_demo(CostFieldKind::kHighCostBlock);
    if (variant == "block4") return cost_field_demo(CostFieldKind::kHigherCostBlock);
    if (variant == "radial") return cost_field_demo(CostFieldKind::kRadial);
    throw InputError("unknown cost field variant: " + variant);
  }
  throw InputError("unknown generator: " + kind);
}

SweepConfig sweep_from_json(const json& j, const std::filesystem::path& base_dir) {
  try {
    SweepConfig c;
    const json& p = j.at("problem");
    if (p.is_string()) {
      c.problem = load_problem(base_dir / p.get<std::string>());
    } else if (p.contains("generator")) {
      c.problem = generate_environment(p);
    } else {
      c.problem = problem_from_json(p);
    }
    for (const json& a : j.at("algorithms")) {
      AlgorithmSpec spec;
      if (a.is_string()) {
        spec.algorithm = parse_algorithm(a.get<std::string>());
        spec.id = a.get<std::string>();
      } else {
        spec.algorithm = parse_algorithm(a.at("algo").get<std::string>());
        spec.id = a.value("id", algorithm_name(spec.algorithm));
        spec.config = planner_config_from_json(a);
      }
      if (spec.algorithm == Algorithm::kFmtKnn) spec.config.variant = PlannerConfig::Variant::kKnn;
      c.algorithms.push_back(std::move(spec));
    }
    c.sample_counts = j.at("sample_counts").get<std::vector<std::size_t>>();
    c.trials = j.value("trials", 50);
    c.seed_base = j.value("seed_base", std::uint64_t{0});
    c.smoothing = j.value("smoothing", false);
    if (j.contains("smoothing_params")) {
      const json& s = j.at("smoothing_params");
      c.smoothing_params.max_rounds = s.value("max_rounds", c.smoothing_params.max_rounds);
      c.smoothing_params.stall_rounds = s.value("stall_rounds", c.smoothing_params.stall_rounds);
      c.smoothing_params.random_attempts_per_vertex =
          s.value("random_attempts_per_vertex", c.smoothing_params.random_attempts_per_vertex);
      c.smoothing_params.partial_attempts_per_vertex =
          s.value("partial_attempts_per_vertex", c.smoothing_params.partial_attempts_per_vertex);
    }
    c.threads = j.value("threads", 0);
    c.validate();
    return c;
  } catch (const json::exception& e) {
    throw InputError(std::string("sweep config: ") + e.what());
  } catch (const SpecError& e) {
    throw InputError(std::string("sweep config: ") + e.what());
  } catch (const ModelError& e) {
    throw InputError(std::string("sweep config: ") + e.what());
  }
}

TrialRecord run_trial(const AlgorithmSpec& algorithm, const ProblemDef& problem, std::size_t n, std::uint64_t seed,
                      bool smooth, const SmoothParams& smoothing, const SampleSet* shared) {
  PlannerConfig config = algorithm.config;
  if (algorithm.algorithm == Algorithm::kFmtKnn) config.variant = PlannerConfig::Variant::kKnn;
  TrialRecord rec;
  rec.algorithm = algorithm.id.empty() ? algorithm_name(algorithm.algorithm) : algorithm.id;
  rec.problem = problem.name;
  rec.n = n;
  rec.seed = seed;

  std::optional<SampleSet> own;
  if (sample_based(algorithm.algorithm) && shared == nullptr) {
    own = sample_problem(problem, n, config.goal_samples, seed);
    shared = &*own;
  }
  const auto start = std::chrono::steady_clock::now();
  PlanResult result;
  switch (algorithm.algorithm) {
    case Algorithm::kFmt:
    case Algorithm::kFmtKnn:
      result = fmt_plan(problem, *shared, config);
      break;
    case Algorithm::kPrm:
      result = prm_star_plan(problem, *shared, config);
      break;
    case Algorithm::kRrt:
      result = rrt_star_plan(problem, config, seed, n);
      break;
    case Algorithm::kDiskGraph: {
      const double r = planning_radius(problem, *shared, config);
      if (r > 0.0) {
        result = disk_graph_shortest_path(problem, *shared, r, true);
      } else if (problem.goal.contains(problem.x_init)) {
        result.success = true;
        result.cost = 0.0;
      }
      break;
    }
  }
  if (smooth && result.success && result.path.size() > 2) {
    SmoothParams params = smoothing;
    params.seed = seed;
    const SmoothResult s = adaptive_shortcut(result.path, problem.world, problem.cost, params);
    result.cost = s.cost;
    result.stats.smoothing_collision_checks = s.collision_checks;
    rec.smoothed = true;
  }
  rec.time_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  rec.success = result.success;
  rec.cost = result.success ? result.cost : std::numeric_limits<double>::infinity();
  rec.collision_checks = result.stats.collision_checks + result.stats.smoothing_collision_checks;
  rec.cost_evals = result.stats.cost_evaluations;
  rec.iterations = result.stats.iterations;
  return rec;
}

std::vector<AggregateRow> aggregate(const std::vector<TrialRecord>& records) {
  std::map<std::pair<std::string, std::size_t>, std::vector<const TrialRecord*>> groups;
  for (const auto& r : records) groups[{r.algorithm, r.n}].push_back(&r);
  std::vector<AggregateRow> rows;
  for (const auto& [key, group] : groups) {
    AggregateRow row;
    row.algorithm = key.first;
    row.n = key.second;
    row.problem = group.front()->problem;
    row.trials = group.size();
    std::vector<double> costs, times;
    for (const TrialRecord* r : group) {
      if (r->success) costs.push_back(r->cost);
      times.push_back(r->time_ms);
      row.mean_collision_checks += static_cast<double>(r->collision_checks);
      row.mean_cost_evals += static_cast<double>(r->cost_evals);
      row.mean_iterations += static_cast<double>(r->iterations);
    }
    const double t = static_cast<double>(row.trials);
    row.mean_collision_checks /= t;
    row.mean_cost_evals /= t;
    row.mean_iterations /= t;
    row.successes = costs.size();
    row.success_rate = static_cast<double>(row.successes) / t;
    const MeanErr c = mean_and_stderr(costs);
    row.mean_cost = costs.empty() ? std::nan("") : c.mean;
    row.cost_stderr = c.stderr_;
    const MeanErr tm = mean_and_stderr(times);
    row.mean_time_ms = tm.mean;
    row.time_stderr = tm.stderr_;
    row.stderr_undefined = costs.size() < 2;
    row.below_half_success = row.success_rate < 0.5;
    rows.push_back(std::move(row));
  }
  return rows;
}

SweepResult run_sweep(const SweepConfig& config) {
  config.validate();
  const std::size_t n_algos = config.algorithms.size();
  const std::size_t n_counts = config.sample_counts.size();
  const std::size_t trials = static_cast<std::size_t>(config.trials);
  SweepResult out;
  out.records.resize(n_algos * n_counts * trials);

  // One task per (n, trial); all algorithms of the task share its samples.
  const std::size_t tasks = n_counts * trials;
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&]() {
    for (std::size_t t = next++; t < tasks; t = next++) {
      const std::size_t ci = t / trials;
      const std::size_t trial = t % trials;
      const std::size_t n = config.sample_counts[ci];
      const std::uint64_t seed = config.seed_base + trial;
      try {
        std::map<std::size_t, SampleSet> sets;  // keyed by goal sample count
        for (std::size_t ai = 0; ai < n_algos; ++ai) {
          const AlgorithmSpec& algo = config.algorithms[ai];
          const SampleSet* shared = nullptr;
          if (sample_based(algo.algorithm)) {
            const std::size_t g = algo.config.goal_samples;
            auto it = sets.find(g);
            if (it == sets.end()) it = sets.emplace(g, sample_problem(config.problem, n, g, seed)).first;
            shared = &it->second;
          }
          out.records[(ai * n_counts + ci) * trials + trial] =
              run_trial(algo, config.problem, n, seed, config.smoothing, config.smoothing_params, shared);
        }
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::size_t threads = config.threads > 0 ? static_cast<std::size_t>(config.threads)
                                           : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, tasks);
  std::vector<std::thread> pool;
  for (std::size_t i = 1; i < threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
  out.summary = aggregate(out.records);
  return out;
}

void write_records_csv(std::ostream& out, const std::vector<TrialRecord>& records) {
  out << "algorithm,problem,n,seed,success,cost,time_ms,collision_checks,cost_evals,iterations,smoothed\n";
  for (const auto& r : records) {
    out << r.algorithm << ',' << r.problem << ',' << r.n << ',' << r.seed << ',' << (r.success ? 1 : 0) << ','
        << (r.success ? format_double(r.cost) : "") << ',' << format_double(r.time_ms) << ',' << r.collision_checks
        << ',' << r.cost_evals << ',' << r.iterations << ',' << (r.smoothed ? 1 : 0) << '\n';
  }
}

std::vector<TrialRecord> read_records_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InputError("empty CSV");
  std::vector<TrialRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != 11) throw InputError("CSV row has " + std::to_string(cells.size()) + " columns");
    TrialRecord r;
    r.algorithm = cells[0];
    r.problem = cells[1];
    r.n = parse_u64(cells[2]);
    r.seed = parse_u64(cells[3]);
    r.success = cells[4] == "1";
    r.cost = parse_double(cells[5]);
    r.time_ms = parse_double(cells[6]);
    r.collision_checks = parse_u64(cells[7]);
    r.cost_evals = parse_u64(cells[8]);
    r.iterations = parse_u64(cells[9]);
    r.smoothed = cells[10] == "1";
    records.push_back(std::move(r));
  }
  return records;
}

void write_summary_csv(std::ostream& out, const std::vector<AggregateRow>& rows) {
  out << "algorithm,problem,n,trials,success_rate,mean_cost,cost_stderr,mean_time_ms,time_stderr,"
         "mean_collision_checks,mean_cost_evals,mean_iterations,stderr_undefined,below_half_success\n";
  for (const auto& r : rows) {
    out << r.algorithm << ',' << r.problem << ',' << r.n << ',' << r.trials << ',' << format_double(r.success_rate)
        << ',' << format_double(r.mean_cost) << ',' << (r.successes ? format_double(r.cost_stderr) : "") << ','
        << format_double(r.mean_time_ms) << ',' << format_double(r.time_stderr) << ','
        << format_double(r.mean_collision_checks) << ',' << format_double(r.mean_cost_evals) << ','
        << format_double(r.mean_iterations) << ',' << (r.stderr_undefined ? 1 : 0) << ','
        << (r.below_half_success ? 1 : 0) << '\n';
  }
}

}  // namespace fmtstar
