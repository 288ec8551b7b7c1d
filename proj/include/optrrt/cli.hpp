#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "optrrt/bench.hpp"
#include "optrrt/path_query.hpp"
#include "optrrt/planners.hpp"
#include "optrrt/scenario.hpp"
#include "optrrt/svg.hpp"

namespace optrrt::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitIo = 3;

struct PlanArgs {
  std::string scenario;
  std::string planner = "rrt_star";
  std::optional<std::size_t> iterations;
  std::uint64_t seed = 1;
  std::optional<double> gamma_mult;
  std::optional<double> eta;
  std::string out;
};

inline nlohmann::json finite_or_null(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

/// Writes <out>.json (run summary) and <out>.svg (graph drawing).
inline int cmd_plan(const PlanArgs& args, std::ostream& out) {
  const auto kind = parse_planner_kind(args.planner);
  if (!kind) throw ValidationError({"unknown planner '" + args.planner + "'"});
  Scenario s = load_scenario(args.scenario);
  if (args.gamma_mult) s.defaults.gamma_multiplier = *args.gamma_mult;
  if (args.eta) s.defaults.eta = *args.eta;
  const NearParams params = s.near_params();
  const std::size_t n = args.iterations.value_or(s.defaults.iterations);

  std::optional<PlannerGraph> graph;
  std::uint32_t final_vertices = 0;
  if (*kind == PlannerKind::prm_star) {
    graph.emplace(prm_star_build(s.world, s.cost, params, n, args.seed));
  } else {
    RunOptions options;
    options.record_timing = false;
    RunResult r = run(s.world, s.cost, *kind, params, n, args.seed, options);
    final_vertices = r.vertex_count.back();
    graph.emplace(std::move(r.graph));
  }
  const PathResult best = is_tree(*kind) ? best_tree_path(*graph, s.world, s.cost)
                                         : best_graph_path(*graph, s.world, s.cost);

  nlohmann::json path = nlohmann::json::array();
  if (best.found) {
    for (const Point& p : best.waypoints.waypoints()) {
      path.push_back(std::vector<double>(p.coords().begin(), p.coords().end()));
    }
  }
  const std::size_t directed = graph->edge_count();
  nlohmann::json summary = {
      {"scenario", s.name},
      {"planner", to_string(*kind)},
      {"iterations", n},
      {"seed", args.seed},
      {"params",
       {{"eta", params.eta},
        {"gamma", params.gamma},
        {"gamma_lower_bound", gamma_lower_bound(s.world)},
        {"unit_ball_volume", params.zeta}}},
      {"vertex_count", graph->size()},
      {"edge_count", directed},
      {"drawn_edge_count", graph->mode() == GraphMode::tree ? directed : directed / 2},
      {"obstacle_checks", graph->obstacle_checks()},
      {"goal_reached", best.found},
      {"best_cost", finite_or_null(best.cost)},
      {"best_path", path},
  };
  if (*kind != PlannerKind::prm_star) summary["final_vertex_count"] = final_vertices;

  write_text_file(args.out + ".json", summary.dump(2) + "\n");
  write_text_file(args.out + ".svg", render_svg(*graph, s.world, s.cost, best));
  out << "wrote " << args.out << ".json and " << args.out << ".svg";
  if (best.found) out << " (best cost " << format_number(best.cost) << ")";
  out << "\n";
  return kExitOk;
}

/// Runs an experiment spec and writes aggregate, per-trial and complexity CSVs.
inline int cmd_bench(const std::string& spec_path, const std::string& out_dir, std::ostream& out) {
  const ExperimentSpec spec =
      parse_experiment_spec(parse_json_text(read_text_file(spec_path), spec_path));
  const ExperimentResult result = run_experiment(spec);
  const auto files = write_experiment_outputs(result, out_dir);
  out << "wrote " << files.size() << " files to " << out_dir << "\n";
  if (std::isfinite(result.oracle_cost)) {
    out << "oracle optimal cost (resolution " << spec.oracle_resolution
        << "): " << format_number(result.oracle_cost) << "\n";
  }
  return kExitOk;
}

inline int cmd_scenarios_list(std::ostream& out) {
  for (const auto& [name, text] : bundled_scenarios()) out << name << "\n";
  return kExitOk;
}

inline int cmd_scenarios_show(const std::string& name, std::ostream& out) {
  out << scenario_to_json(load_scenario(name)).dump(2) << "\n";
  return kExitOk;
}

/// Validates each file (or bundled name) and prints its derived constants.
inline int cmd_scenarios_validate(const std::vector<std::string>& targets, std::ostream& out,
                                  std::ostream& err) {
  int status = kExitOk;
  for (const auto& target : targets) {
    try {
      const Scenario s = load_scenario(target);
      const double gamma_l = gamma_lower_bound(s.world);
      out << target << ": ok\n";
      out << "  name: " << s.name << "\n";
      out << "  dimension: " << s.world.dimension() << "\n";
      out << "  free_space_measure: " << format_number(free_space_measure(s.world)) << "\n";
      out << "  gamma_lower_bound: " << format_number(gamma_l) << "\n";
      out << "  default_gamma: " << format_number(s.defaults.gamma_multiplier * gamma_l) << "\n";
      out << "  cost: " << to_string(s.cost.kind()) << "\n";
      if (s.cost.kind() == CostKind::line_integral) {
        out << "  weights:";
        const char* sep = " ";
        for (const auto& r : s.cost.regions()) {
          out << sep << format_number(r.weight);
          sep = ", ";
        }
        out << sep << format_number(s.cost.default_weight()) << "\n";
      }
    } catch (const ValidationError& e) {
      err << target << ": invalid\n";
      for (const auto& issue : e.issues()) err << "  - " << issue << "\n";
      status = kExitUsage;
    } catch (const IoError& e) {
      err << target << ": " << e.what() << "\n";
      status = kExitUsage;
    }
  }
  return status;
}

/// Entry point behind the `optrrt` executable. Exit codes: 0 success,
/// 2 usage or validation failure, 3 I/O failure.
inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sampling-based motion planning: RRT, RRG, RRT* and PRM*", "optrrt"};
  app.require_subcommand(1);

  PlanArgs plan;
  auto* plan_cmd = app.add_subcommand("plan", "Run one planner and write <out>.json and <out>.svg");
  plan_cmd->add_option("--scenario", plan.scenario, "Scenario file or bundled name")->required();
  plan_cmd->add_option("--planner", plan.planner, "rrt | rrg | rrt_star | prm_star");
  plan_cmd->add_option("--iterations", plan.iterations, "Iterations (samples for prm_star)");
  plan_cmd->add_option("--seed", plan.seed, "Sampling seed");
  plan_cmd->add_option("--gamma-mult", plan.gamma_mult, "Near constant as a multiple of gamma_L");
  plan_cmd->add_option("--eta", plan.eta, "Steering bound");
  plan_cmd->add_option("--out", plan.out, "Output prefix")->required();

  std::string spec_path;
  std::string out_dir;
  auto* bench_cmd = app.add_subcommand("bench", "Run a Monte-Carlo experiment spec");
  bench_cmd->add_option("spec", spec_path, "Experiment spec JSON")->required();
  bench_cmd->add_option("out_dir", out_dir, "Output directory")->required();

  auto* scen_cmd = app.add_subcommand("scenarios", "List, show or validate scenarios");
  scen_cmd->require_subcommand(1);
  scen_cmd->add_subcommand("list", "List bundled scenarios");
  std::string show_name;
  auto* show_cmd = scen_cmd->add_subcommand("show", "Print a scenario as JSON");
  show_cmd->add_option("name", show_name, "Scenario file or bundled name")->required();
  std::vector<std::string> targets;
  auto* validate_cmd = scen_cmd->add_subcommand("validate", "Validate scenario files");
  validate_cmd->add_option("files", targets, "Scenario files or bundled names")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*plan_cmd) return cmd_plan(plan, out);
    if (*bench_cmd) return cmd_bench(spec_path, out_dir, out);
    if (scen_cmd->got_subcommand("list")) return cmd_scenarios_list(out);
    if (*show_cmd) return cmd_scenarios_show(show_name, out);
    if (*validate_cmd) return cmd_scenarios_validate(targets, out, err);
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ConfigurationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace optrrt::cli
