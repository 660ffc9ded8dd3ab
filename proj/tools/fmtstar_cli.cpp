#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "fmtstar/environments.hpp"
#include "fmtstar/errors.hpp"
#include "fmtstar/harness.hpp"
#include "fmtstar/oracles.hpp"
#include "fmtstar/planners.hpp"
#include "fmtstar/smoothing.hpp"

using namespace fmtstar;
using nlohmann::json;

namespace {

json cost_json(double c) { return std::isfinite(c) ? json(c) : json(nullptr); }

json result_json(const PlanResult& r, const std::string& algo, std::size_t n, std::uint64_t seed) {
  json path = json::array();
  for (const Point& p : r.path) path.push_back(p.values());
  return {{"algorithm", algo},
          {"n", n},
          {"seed", seed},
          {"success", r.success},
          {"cost", cost_json(r.cost)},
          {"path", path},
          {"path_nodes", r.path_nodes},
          {"radius", r.radius},
          {"k", r.k},
          {"warnings", r.warnings},
          {"stats",
           {{"iterations", r.stats.iterations},
            {"collision_checks", r.stats.collision_checks},
            {"cost_evaluations", r.stats.cost_evaluations},
            {"near_computations", r.stats.near_computations},
            {"wall_time_ms", r.stats.wall_time_ms},
            {"smoothing_collision_checks", r.stats.smoothing_collision_checks}}}};
}

void write_json(const json& j, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << j.dump(2) << '\n';
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"FMT* motion planning: planners, benchmark worlds and sweeps"};
  app.require_subcommand(1);

  // plan
  auto* plan = app.add_subcommand("plan", "Solve one problem with one planner");
  std::string problem_path, algo = "fmt", out_path;
  std::size_t n = 1000;
  std::uint64_t seed = 0;
  std::optional<double> eta, rm, k0;
  bool smooth = false;
  plan->add_option("--problem", problem_path, "Problem JSON")->required();
  plan->add_option("--algo", algo, "fmt | fmt-knn | prm | rrt | oracle")
      ->check(CLI::IsMember({"fmt", "fmt-knn", "prm", "rrt", "oracle"}));
  plan->add_option("--n", n, "Sample count (iterations for rrt)");
  plan->add_option("--seed", seed, "Random seed");
  auto* eta_opt = plan->add_option("--eta", eta, "Radius slack eta");
  auto* rm_opt = plan->add_option("--rm", rm, "Radius multiplier");
  plan->add_option("--k0", k0, "k-nearest constant");
  eta_opt->excludes(rm_opt);
  plan->add_option("--out", out_path, "Result JSON (stdout when omitted)");
  plan->add_flag("--smooth", smooth, "Post-process the path with shortcut smoothing");

  // env gen
  auto* env = app.add_subcommand("env", "Benchmark environments");
  env->require_subcommand(1);
  auto* gen = env->add_subcommand("gen", "Generate a problem JSON");
  std::string kind, variant = "block2";
  int dim = 2;
  std::uint64_t env_seed = 0;
  std::string env_out;
  gen->add_option("--kind", kind, "maze | bugtrap | clutter | costfield")
      ->required()
      ->check(CLI::IsMember({"maze", "bugtrap", "clutter", "costfield"}));
  gen->add_option("--dim", dim, "Dimension (maze, clutter)");
  gen->add_option("--seed", env_seed, "Seed (clutter)");
  gen->add_option("--variant", variant, "Cost field: block2 | block4 | radial");
  gen->add_option("--out", env_out, "Output path (stdout when omitted)");

  // bench
  auto* bench = app.add_subcommand("bench", "Run a sweep and write CSV files");
  std::string config_path, out_dir = "results";
  bool bench_smooth = false;
  bench->add_option("--config", config_path, "Sweep JSON")->required();
  bench->add_option("--out-dir", out_dir, "Output directory");
  bench->add_flag("--smooth", bench_smooth, "Smooth every successful path");

  // oracle grid
  auto* oracle = app.add_subcommand("oracle", "Reference solvers");
  oracle->require_subcommand(1);
  auto* grid = oracle->add_subcommand("grid", "Grid Dijkstra cost estimate");
  std::string grid_problem, connectivity = "full";
  int res = 256;
  grid->add_option("--problem", grid_problem, "Problem JSON")->required();
  grid->add_option("--res", res, "Cells per axis");
  grid->add_option("--connectivity", connectivity, "full | axis")->check(CLI::IsMember({"full", "axis"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (plan->parsed()) {
      const ProblemDef problem = load_problem(problem_path);
      problem.validate();
      AlgorithmSpec spec;
      spec.algorithm = parse_algorithm(algo);
      spec.config.eta = eta;
      spec.config.radius_multiplier = rm;
      spec.config.k0 = k0;
      if (spec.algorithm == Algorithm::kFmtKnn) spec.config.variant = PlannerConfig::Variant::kKnn;
      spec.config.validate();
      PlanResult result;
      if (spec.algorithm == Algorithm::kRrt) {
        result = rrt_star_plan(problem, spec.config, seed, n);
      } else {
        const SampleSet samples = sample_problem(problem, n, spec.config.goal_samples, seed);
        switch (spec.algorithm) {
          case Algorithm::kPrm: result = prm_star_plan(problem, samples, spec.config); break;
          case Algorithm::kDiskGraph:
            result = disk_graph_shortest_path(problem, samples, planning_radius(problem, samples, spec.config), true);
            break;
          default: result = fmt_plan(problem, samples, spec.config); break;
        }
      }
      json j = result_json(result, algo, n, seed);
      if (smooth && result.success) {
        SmoothParams params;
        params.seed = seed;
        const SmoothResult s = adaptive_shortcut(result.path, problem.world, problem.cost, params);
        json path = json::array();
        for (const Point& p : s.path) path.push_back(p.values());
        j["smoothed"] = {{"cost", s.cost}, {"path", path}, {"collision_checks", s.collision_checks}, {"rounds", s.rounds}};
      }
      write_json(j, out_path);
      return 0;
    }
    if (env->parsed()) {
      json spec = {{"generator", kind}, {"dim", dim}, {"seed", env_seed}, {"variant", variant}};
      const ProblemDef problem = generate_environment(spec);
      if (env_out.empty()) {
        std::cout << to_json(problem).dump(2) << '\n';
      } else {
        save_problem(problem, env_out);
      }
      return 0;
    }
    if (bench->parsed()) {
      SweepConfig config;
      try {
        std::ifstream in(config_path);
        if (!in) throw InputError("cannot read " + config_path);
        json j;
        try {
          j = json::parse(in);
        } catch (const json::exception& e) {
          throw InputError(e.what());
        }
        config = sweep_from_json(j, std::filesystem::path(config_path).parent_path());
        if (bench_smooth) config.smoothing = true;
      } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
      }
      const SweepResult result = run_sweep(config);
      std::filesystem::create_directories(out_dir);
      std::ofstream records(std::filesystem::path(out_dir) / "records.csv");
      write_records_csv(records, result.records);
      std::ofstream summary(std::filesystem::path(out_dir) / "summary.csv");
      write_summary_csv(summary, result.summary);
      if (!records || !summary) throw std::runtime_error("cannot write to " + out_dir);
      std::cout << "wrote " << result.records.size() << " records to " << out_dir << '\n';
      return 0;
    }
    if (grid->parsed()) {
      const ProblemDef problem = load_problem(grid_problem);
      GridSpec spec;
      spec.resolution = res;
      spec.connectivity = connectivity == "axis" ? GridSpec::Connectivity::kAxis : GridSpec::Connectivity::kFullDiagonal;
      const GridResult r = grid_dijkstra(problem, spec);
      std::cout << json{{"feasible", r.feasible}, {"cost", cost_json(r.cost)}, {"cells_settled", r.cells_settled}}.dump(2)
                << '\n';
      return 0;
    }
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
