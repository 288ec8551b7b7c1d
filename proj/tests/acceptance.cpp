// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "optrrt/cli.hpp"
#include "optrrt/optrrt.hpp"

using namespace optrrt;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

int failures = 0;

void report(int id, const char* title, bool pass, const std::string& detail) {
  std::printf("%s criterion %d: %s | %s\n", pass ? "PASS" : "FAIL", id, title, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

RunResult quiet_run(const Scenario& s, PlannerKind kind, std::size_t n, std::uint64_t seed, RunOptions options = {}) {
  options.record_timing = false;
  return run(s.world, s.cost, kind, s.near_params(), n, seed, options);
}

bool edges_subset(const PlannerGraph& small, const PlannerGraph& big) {
  const auto a = small.edges();
  const auto b = big.edges();
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

const AggregateRow& final_row(const ExperimentResult& r, PlannerKind kind) {
  for (auto it = r.aggregate.rbegin(); it != r.aggregate.rend(); ++it) {
    if (it->planner == kind) return *it;
  }
  throw std::logic_error("planner missing from aggregate");
}

const ComplexityRow& complexity_row(const ExperimentResult& r, PlannerKind kind, std::size_t n) {
  for (const auto& row : r.complexity) {
    if (row.planner == kind && row.n == n) return row;
  }
  throw std::logic_error("complexity row missing");
}

ExperimentSpec final_cost_spec(const char* scenario) {
  ExperimentSpec spec;
  spec.scenario = scenario;
  spec.planners = {PlannerKind::rrt, PlannerKind::rrt_star};
  spec.iterations = 20000;
  spec.trials = 50;
  spec.base_seed = 1;
  spec.stride = 20000;
  return spec;
}

void criterion_1() {
  const auto start = Clock::now();
  const Scenario s = load_scenario("scenario2_obstacles_two_homotopy");
  bool ok = true;
  std::string where;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const RunResult rrt = quiet_run(s, PlannerKind::rrt, 2000, seed);
    const RunResult rrg = quiet_run(s, PlannerKind::rrg, 2000, seed);
    const RunResult star = quiet_run(s, PlannerKind::rrt_star, 2000, seed);
    const bool seed_ok = rrt.graph.vertices() == rrg.graph.vertices() &&
                         star.graph.vertices() == rrg.graph.vertices() && edges_subset(rrt.graph, rrg.graph) &&
                         edges_subset(star.graph, rrg.graph);
    if (!seed_ok && ok) where = fmt(", first mismatch at seed %llu", static_cast<unsigned long long>(seed));
    ok = ok && seed_ok;
  }
  const double elapsed = seconds_since(start);
  report(1, "vertex sets equal and edge sets nested (10 seeds x 2000 iterations, scenario2)", ok && elapsed < 60.0,
         fmt("exact=%s%s, runtime %.1f s (limit 60 s)", ok ? "yes" : "no", where.c_str(), elapsed));
}

void criterion_2() {
  const auto start = Clock::now();
  const ExperimentResult r = run_experiment(final_cost_spec("scenario1_empty"));
  const double c_star = 7.0 * std::sqrt(2.0);
  const AggregateRow& rrt = final_row(r, PlannerKind::rrt);
  const AggregateRow& star = final_row(r, PlannerKind::rrt_star);
  const double elapsed = seconds_since(start);
  const bool close = std::abs(star.mean_cost - c_star) <= 0.03 * c_star;
  const bool gap = rrt.mean_cost >= 1.15 * star.mean_cost;
  const bool spread = rrt.var_cost >= 5.0 * star.var_cost;
  report(2, "RRT* near-optimal, RRT not (scenario1, 50 x 20000)", close && gap && spread && elapsed < 1200.0,
         fmt("c*=%.4f mean RRT*=%.4f (%+.2f%%, limit 3%%), mean RRT=%.4f (x%.3f, need >= 1.15), "
             "var RRT=%.4f var RRT*=%.6f (x%.0f, need >= 5), runtime %.0f s",
             c_star, star.mean_cost, 100.0 * (star.mean_cost / c_star - 1.0), rrt.mean_cost,
             rrt.mean_cost / star.mean_cost, rrt.var_cost, star.var_cost, rrt.var_cost / star.var_cost, elapsed));
}

void criterion_3() {
  const auto start = Clock::now();
  ExperimentSpec spec = final_cost_spec("scenario2_obstacles_two_homotopy");
  spec.oracle_resolution = 512;
  const ExperimentResult r = run_experiment(spec);
  const AggregateRow& rrt = final_row(r, PlannerKind::rrt);
  const AggregateRow& star = final_row(r, PlannerKind::rrt_star);
  const bool close = std::abs(star.mean_cost - r.oracle_cost) <= 0.05 * r.oracle_cost;
  const bool gap = rrt.mean_cost >= 1.2 * star.mean_cost;
  report(3, "obstacle scenario convergence (scenario2, 50 x 20000, oracle 512)", close && gap,
         fmt("oracle=%.4f mean RRT*=%.4f (%+.2f%%, limit 5%%), mean RRT=%.4f (x%.3f, need >= 1.2), runtime %.0f s",
             r.oracle_cost, star.mean_cost, 100.0 * (star.mean_cost / r.oracle_cost - 1.0), rrt.mean_cost,
             rrt.mean_cost / star.mean_cost, seconds_since(start)));
}

void criterion_4() {
  const auto start = Clock::now();
  const Scenario s = load_scenario("scenario3_costfield");
  const double oracle = oracle_optimal_cost(s.world, s.cost, 512);
  int within = 0;
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const RunResult r = quiet_run(s, PlannerKind::rrt_star, 20000, seed);
    const PathResult best = best_tree_path(r.graph, s.world, s.cost);
    const double rel = best.found ? std::abs(best.cost / oracle - 1.0) : INFINITY;
    worst = std::max(worst, rel);
    if (rel <= 0.05) ++within;
  }
  report(4, "cost-field RRT* paths near the oracle (scenario3, 10 seeds x 20000)", within >= 8,
         fmt("oracle=%.4f, %d/10 within 5%% (need >= 8), worst deviation %.2f%%, runtime %.0f s", oracle, within,
             100.0 * worst, seconds_since(start)));
}

void criterion_5() {
  const auto start = Clock::now();
  ExperimentSpec rrg;
  rrg.scenario = "scenario1_empty";
  rrg.planners = {PlannerKind::rrg};
  rrg.iterations = 100000;
  rrg.trials = 3;
  rrg.stride = 100000;
  rrg.track_cost = false;
  const ExperimentResult calls = run_experiment(rrg);
  const double at_1e4 = complexity_row(calls, PlannerKind::rrg, 10000).mean_obstaclefree_per_log_n;
  const double at_1e5 = complexity_row(calls, PlannerKind::rrg, 100000).mean_obstaclefree_per_log_n;
  const double call_ratio = at_1e5 / at_1e4;
  const bool calls_ok = call_ratio <= 2.0 && call_ratio >= 0.5;

  // Timing is serial so trials do not compete for cores.
  ExperimentSpec timed;
  timed.scenario = "scenario1_empty";
  timed.planners = {PlannerKind::rrt, PlannerKind::rrt_star};
  timed.iterations = 200000;
  timed.trials = 3;
  timed.stride = 200000;
  timed.timing = true;
  const ExperimentResult times = run_experiment(timed, 1);
  const double ratio_1e5 = complexity_row(times, PlannerKind::rrt_star, 100000).time_ratio_vs_rrt;
  const double ratio_2e5 = complexity_row(times, PlannerKind::rrt_star, 200000).time_ratio_vs_rrt;
  const double drift = std::abs(ratio_2e5 / ratio_1e5 - 1.0);
  const bool time_ok = drift < 0.25;
  report(5, "complexity: RRG calls/log n bounded, RRT*/RRT time ratio settles", calls_ok && time_ok,
         fmt("RRG O/log n: %.3f at 1e4, %.3f at 1e5 (ratio %.3f, need within 2x); RRT*/RRT time: %.3f at 1e5, "
             "%.3f at 2e5 (drift %.1f%%, limit 25%%), runtime %.0f s",
             at_1e4, at_1e5, call_ratio, ratio_1e5, ratio_2e5, 100.0 * drift, seconds_since(start)));
}

void criterion_6() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::vector<double>> pts(10000, std::vector<double>(2));
  for (auto& p : pts) p = {u(rng), u(rng)};
  KdIndex idx(2);
  for (VertexId i = 0; i < pts.size(); ++i) idx.insert(pts[i], i);
  const auto sq = [](const std::vector<double>& a, const std::vector<double>& b) {
    return (a[0] - b[0]) * (a[0] - b[0]) + (a[1] - b[1]) * (a[1] - b[1]);
  };
  int nearest_bad = 0;
  int range_bad = 0;
  for (int q = 0; q < 1000; ++q) {
    const std::vector<double> x{u(rng), u(rng)};
    VertexId best = 0;
    for (VertexId i = 1; i < pts.size(); ++i) {
      if (sq(pts[i], x) < sq(pts[best], x)) best = i;
    }
    const auto hit = idx.nearest(x);
    if (hit.id != best || hit.distance != std::sqrt(sq(pts[best], x))) ++nearest_bad;
  }
  for (int q = 0; q < 100; ++q) {
    const std::vector<double> x{u(rng), u(rng)};
    const double r = 0.01 + 0.1 * u(rng);
    std::vector<VertexId> expected;
    for (VertexId i = 0; i < pts.size(); ++i) {
      if (sq(pts[i], x) <= r * r) expected.push_back(i);
    }
    if (idx.near(x, r) != expected) ++range_bad;
  }
  report(6, "kd-index equals linear scan (1e3 nearest + 1e2 range on 1e4 points)", nearest_bad == 0 && range_bad == 0,
         fmt("nearest mismatches %d/1000, range mismatches %d/100", nearest_bad, range_bad));
}

bool tree_consistent(const PlannerGraph& g, const CostModel& cost, double& worst) {
  if (g.edge_count() != g.size() - 1 || g.parent(0) != kNoVertex) return false;
  std::vector<double> c(g.size(), -1.0);
  c[0] = 0.0;
  std::vector<VertexId> stack{0};
  std::size_t reached = 1;
  while (!stack.empty()) {
    const VertexId u = stack.back();
    stack.pop_back();
    for (VertexId v : g.neighbors(u)) {
      if (g.parent(v) != u || c[v] >= 0.0) return false;
      c[v] = c[u] + cost.segment_cost(g.vertex(u).coords(), g.vertex(v).coords());
      worst = std::max(worst, std::abs(c[v] - g.cost_to_come(v)));
      ++reached;
      stack.push_back(v);
    }
  }
  return reached == g.size();
}

void criterion_7() {
  const auto start = Clock::now();
  std::vector<std::string> broken;

  // Y monotone and the sure orderings on shared sequences.
  for (const char* name : {"scenario2_obstacles_two_homotopy", "scenario3_costfield"}) {
    const Scenario s = load_scenario(name);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const RunResult rrt = quiet_run(s, PlannerKind::rrt, 5000, seed);
      const RunResult rrg = quiet_run(s, PlannerKind::rrg, 5000, seed);
      const RunResult star = quiet_run(s, PlannerKind::rrt_star, 5000, seed);
      for (const RunResult* r : {&rrt, &rrg, &star}) {
        if (!std::is_sorted(r->best_cost.rbegin(), r->best_cost.rend())) {
          broken.push_back(fmt("Y not monotone (%s, %s, seed %llu)", to_string(r->kind), name,
                               static_cast<unsigned long long>(seed)));
        }
      }
      for (std::size_t i = 0; i < rrg.best_cost.size(); ++i) {
        if (rrg.best_cost[i] > rrt.best_cost[i] || rrg.best_cost[i] > star.best_cost[i]) {
          broken.push_back(fmt("Y ordering at iteration %zu (%s, seed %llu)", i + 1, name,
                               static_cast<unsigned long long>(seed)));
          break;
        }
      }
    }
  }

  // Tree invariants and cost consistency after every iteration.
  double worst = 0.0;
  for (const char* name : {"scenario2_obstacles_two_homotopy", "scenario3_costfield"}) {
    const Scenario s = load_scenario(name);
    for (PlannerKind kind : {PlannerKind::rrt, PlannerKind::rrt_star}) {
      RunOptions options;
      std::size_t bad_at = 0;
      double kind_worst = 0.0;
      options.observer = [&](const PlannerGraph& g, std::size_t i) {
        if (bad_at == 0 && !tree_consistent(g, s.cost, kind_worst)) bad_at = i;
      };
      quiet_run(s, kind, 5000, 17, options);
      if (bad_at != 0) broken.push_back(fmt("tree invariant (%s, %s, iteration %zu)", to_string(kind), name, bad_at));
      if (kind == PlannerKind::rrt_star) worst = std::max(worst, kind_worst);
    }
  }
  if (worst >= 1e-9) broken.push_back(fmt("RRT* cost drift %.3g", worst));

  // Additivity and monotonicity of both cost models.
  const Scenario plain = load_scenario("scenario1_empty");
  const Scenario field = load_scenario("scenario3_costfield");
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  double worst_additivity = 0.0;
  for (const CostModel* m : {&plain.cost, &field.cost}) {
    for (int i = 0; i < 1000; ++i) {
      std::vector<Point> a;
      for (int k = 0; k < 4; ++k) a.push_back(Point({u(rng), u(rng)}));
      std::vector<Point> b{a.back()};
      for (int k = 0; k < 3; ++k) b.push_back(Point({u(rng), u(rng)}));
      const Polyline p1(a);
      const Polyline p2(b);
      const double c1 = m->path_cost(p1);
      const double joined = m->path_cost(concat(p1, p2));
      worst_additivity = std::max(worst_additivity, std::abs(joined - c1 - m->path_cost(p2)) / joined);
      if (c1 > joined) broken.push_back("cost monotonicity");
    }
  }
  if (worst_additivity > 1e-12) broken.push_back(fmt("additivity error %.3g", worst_additivity));

  std::string detail = broken.empty() ? "all hold" : broken.front();
  if (broken.size() > 1) detail += fmt(" (+%zu more)", broken.size() - 1);
  report(7, "property suites (Y monotone, tree invariants, cost consistency, Y orderings, cost additivity)",
         broken.empty(),
         fmt("%s; max RRT* cost drift %.2g, max additivity error %.2g, runtime %.0f s", detail.c_str(), worst,
             worst_additivity, seconds_since(start)));
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int run_cli_quiet(std::vector<std::string> args) {
  args.insert(args.begin(), "optrrt");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  return cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

void criterion_8() {
  const fs::path dir = fs::temp_directory_path() / "optrrt_acceptance_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::vector<std::string> differing;
  int failed_runs = 0;

  for (const char* planner : {"rrt", "rrg", "rrt_star", "prm_star"}) {
    for (const char* tag : {"a", "b"}) {
      failed_runs += run_cli_quiet({"plan", "--scenario", "scenario2_obstacles_two_homotopy", "--planner", planner,
                                    "--iterations", "2000", "--seed", "7", "--out",
                                    (dir / (std::string(planner) + "_" + tag)).string()}) != 0;
    }
    for (const char* ext : {".json", ".svg"}) {
      const std::string stem = (dir / planner).string();
      if (slurp(stem + "_a" + ext) != slurp(stem + "_b" + ext)) differing.push_back(std::string(planner) + ext);
    }
  }

  {
    std::ofstream spec(dir / "spec.json");
    spec << R"({"scenario": "scenario3_costfield", "planners": ["rrt", "rrg", "rrt_star"],
               "iterations": 2000, "trials": 4, "base_seed": 3, "stride": 500})";
  }
  const char* saved = std::getenv("OPTRRT_THREADS");
  const std::string saved_value = saved != nullptr ? saved : "";
  setenv("OPTRRT_THREADS", "1", 1);
  failed_runs += run_cli_quiet({"bench", (dir / "spec.json").string(), (dir / "serial").string()}) != 0;
  setenv("OPTRRT_THREADS", "4", 1);
  failed_runs += run_cli_quiet({"bench", (dir / "spec.json").string(), (dir / "parallel").string()}) != 0;
  failed_runs += run_cli_quiet({"bench", (dir / "spec.json").string(), (dir / "parallel_again").string()}) != 0;
  if (saved != nullptr) {
    setenv("OPTRRT_THREADS", saved_value.c_str(), 1);
  } else {
    unsetenv("OPTRRT_THREADS");
  }
  std::size_t compared = 0;
  for (const auto& entry : fs::directory_iterator(dir / "serial")) {
    const auto name = entry.path().filename();
    ++compared;
    const std::string serial = slurp(entry.path());
    if (serial != slurp(dir / "parallel" / name) || serial != slurp(dir / "parallel_again" / name)) {
      differing.push_back(name.string());
    }
  }
  report(8, "determinism of JSON/SVG/CSV outputs, serial and parallel", differing.empty() && failed_runs == 0,
         fmt("8 plan outputs and %zu bench files compared, %zu differ, %d failed runs", compared, differing.size(),
             failed_runs));
}

}  // namespace

int main() {
  const auto start = Clock::now();
  std::printf("acceptance run, %zu worker thread(s)\n", worker_count_from_env());
  const std::vector<void (*)()> criteria{criterion_1, criterion_2, criterion_3, criterion_4,
                                         criterion_5, criterion_6, criterion_7, criterion_8};
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    try {
      criteria[i]();
    } catch (const std::exception& e) {
      report(static_cast<int>(i + 1), "raised an exception", false, e.what());
    }
  }
  std::printf("%d of %zu criteria failed, total %.0f s\n", failures, criteria.size(), seconds_since(start));
  return failures == 0 ? 0 : 1;
}
