#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "optrrt/path_query.hpp"
#include "optrrt/planners.hpp"
#include "optrrt/scenario.hpp"

namespace optrrt {

/// Monte-Carlo protocol: every listed planner runs `trials` times; trial t
/// uses seed base_seed + t for all planners, so they consume the same
/// sample sequence.
struct ExperimentSpec {
  std::string scenario;
  std::vector<PlannerKind> planners;
  std::size_t iterations = 20000;
  std::size_t trials = 50;
  std::uint64_t base_seed = 1;
  std::size_t stride = 100;
  /// Grid resolution for the optimal-cost oracle; 0 skips it.
  std::size_t oracle_resolution = 0;
  /// Wall-clock columns are only measured when set; otherwise they read 0
  /// and every output is a pure function of the spec.
  bool timing = false;
  bool track_cost = true;

  void validate() const {
    std::vector<std::string> issues;
    if (scenario.empty()) issues.emplace_back("scenario: required");
    if (planners.empty()) issues.emplace_back("planners: at least one planner required");
    for (PlannerKind k : planners) {
      if (k == PlannerKind::prm_star) issues.emplace_back("planners: prm_star is not incremental");
    }
    if (iterations == 0) issues.emplace_back("iterations: must be positive");
    if (trials == 0) issues.emplace_back("trials: must be positive");
    if (stride == 0 || (iterations != 0 && iterations % stride != 0)) {
      issues.emplace_back("stride: must divide iterations");
    }
    if (oracle_resolution != 0 && oracle_resolution < 64) {
      issues.emplace_back("oracle_resolution: 0 or at least 64");
    }
    if (!issues.empty()) throw ValidationError(issues);
  }
};

inline ExperimentSpec parse_experiment_spec(const nlohmann::json& j) {
  ExperimentSpec spec;
  try {
    if (!j.is_object()) throw ValidationError({"experiment spec must be a JSON object"});
    spec.scenario = j.at("scenario").get<std::string>();
    for (const auto& name : j.at("planners")) {
      const auto kind = parse_planner_kind(name.get<std::string>());
      if (!kind) throw ValidationError({"planners: unknown planner " + name.dump()});
      spec.planners.push_back(*kind);
    }
    spec.iterations = j.value("iterations", spec.iterations);
    spec.trials = j.value("trials", spec.trials);
    spec.base_seed = j.value("base_seed", spec.base_seed);
    spec.stride = j.value("stride", spec.stride);
    spec.oracle_resolution = j.value("oracle_resolution", spec.oracle_resolution);
    spec.timing = j.value("timing", spec.timing);
    spec.track_cost = j.value("track_cost", spec.track_cost);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError({std::string("experiment spec: ") + e.what()});
  }
  spec.validate();
  return spec;
}

/// Snapshot of one run at a recorded iteration.
struct StridePoint {
  std::size_t iteration = 0;
  double best_cost = 0.0;
  std::uint32_t vertex_count = 0;
  /// Mean of O_i / log N_i over the iterations since the previous point.
  double obstaclefree_per_log_n = 0.0;
  double walltime = 0.0;
  /// FNV-1a over the vertex coordinates inserted so far.
  std::uint64_t vertex_hash = 0;
};

struct TrialRecord {
  PlannerKind planner = PlannerKind::rrt;
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  std::uint64_t sample_hash = 0;
  std::vector<StridePoint> points;
  /// Same quantities at the complexity checkpoints; the O_i / log N_i window
  /// there is (n / 2, n].
  std::vector<StridePoint> checkpoints;
};

struct AggregateRow {
  std::size_t iteration = 0;
  PlannerKind planner = PlannerKind::rrt;
  double mean_cost = 0.0;
  double var_cost = 0.0;
  double mean_obstaclefree_per_log_n = 0.0;
  double mean_walltime = 0.0;
};

struct ComplexityRow {
  std::size_t n = 0;
  PlannerKind planner = PlannerKind::rrt;
  double mean_obstaclefree_per_log_n = 0.0;
  double mean_walltime = 0.0;
  /// Mean over trials of this planner's cumulative time over RRT's.
  double time_ratio_vs_rrt = std::numeric_limits<double>::quiet_NaN();
};

struct ExperimentResult {
  ExperimentSpec spec;
  std::vector<TrialRecord> trials;
  std::vector<AggregateRow> aggregate;
  std::vector<ComplexityRow> complexity;
  double oracle_cost = std::numeric_limits<double>::quiet_NaN();
};

/// Worker count: OPTRRT_THREADS when set to a positive integer, otherwise
/// the hardware concurrency.
inline std::size_t worker_count_from_env() {
  if (const char* env = std::getenv("OPTRRT_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// 10, 20, 50, 100, ... up to n, plus n itself.
inline std::vector<std::size_t> complexity_checkpoints(std::size_t n) {
  std::vector<std::size_t> out;
  for (std::size_t decade = 10; decade <= n; decade *= 10) {
    for (std::size_t m : {1u, 2u, 5u}) {
      if (decade * m <= n) out.push_back(decade * m);
    }
  }
  if (out.empty() || out.back() != n) out.push_back(n);
  return out;
}

namespace detail {

inline double mean_checks_per_log_n(const RunResult& r, std::size_t from, std::size_t to) {
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = from; i < to; ++i) {
    if (r.vertex_count[i] < 2) continue;
    sum += r.obstacle_checks[i] / std::log(static_cast<double>(r.vertex_count[i]));
    ++count;
  }
  return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

inline TrialRecord summarize_run(const RunResult& r, const ExperimentSpec& spec, std::size_t trial) {
  TrialRecord rec{r.kind, trial, r.seed, r.sample_hash, {}, {}};
  std::vector<std::uint64_t> prefix_hash(r.graph.size() + 1, kFnvOffset);
  for (VertexId v = 0; v < r.graph.size(); ++v) prefix_hash[v + 1] = hash_point(prefix_hash[v], r.graph.vertex(v));
  const auto point_at = [&](std::size_t iteration, std::size_t window_start) {
    const std::size_t i = iteration - 1;
    return StridePoint{iteration,
                       r.best_cost[i],
                       r.vertex_count[i],
                       mean_checks_per_log_n(r, window_start, iteration),
                       r.walltime.empty() ? 0.0 : r.walltime[i],
                       prefix_hash[r.vertex_count[i]]};
  };
  for (std::size_t it = spec.stride; it <= spec.iterations; it += spec.stride) {
    rec.points.push_back(point_at(it, it - spec.stride));
  }
  for (std::size_t n : complexity_checkpoints(spec.iterations)) rec.checkpoints.push_back(point_at(n, n / 2));
  return rec;
}

inline void check_shared_sequence(const std::vector<TrialRecord>& group) {
  for (const TrialRecord& rec : group) {
    if (rec.sample_hash != group.front().sample_hash) {
      throw std::logic_error("shared sample sequence violated in trial " + std::to_string(rec.trial));
    }
    for (std::size_t k = 0; k < rec.points.size(); ++k) {
      if (rec.points[k].vertex_hash != group.front().points[k].vertex_hash) {
        throw std::logic_error("vertex sets diverged at iteration " +
                               std::to_string(rec.points[k].iteration) + " in trial " +
                               std::to_string(rec.trial));
      }
    }
  }
}

}  // namespace detail

/// Runs every (trial, planner) pair, checks the shared-sequence contract and
/// aggregates. Trials are spread over `workers` threads; results do not
/// depend on the worker count.
inline ExperimentResult run_experiment(const ExperimentSpec& spec, const Scenario& scenario,
                                       std::size_t workers = worker_count_from_env()) {
  spec.validate();
  const NearParams params = scenario.near_params();
  const std::size_t planners = spec.planners.size();
  ExperimentResult result;
  result.spec = spec;
  result.trials.resize(spec.trials * planners);

  RunOptions options;
  options.track_cost = spec.track_cost;
  options.record_timing = spec.timing;
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(spec.trials);
  const auto worker = [&] {
    for (std::size_t t = next++; t < spec.trials; t = next++) {
      try {
        for (std::size_t p = 0; p < planners; ++p) {
          const RunResult r = run(scenario.world, scenario.cost, spec.planners[p], params,
                                  spec.iterations, spec.base_seed + t, options);
          result.trials[t * planners + p] = detail::summarize_run(r, spec, t);
        }
      } catch (...) {
        errors[t] = std::current_exception();
      }
    }
  };
  const std::size_t n_workers = std::clamp<std::size_t>(workers, 1, spec.trials);
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  for (std::size_t t = 0; t < spec.trials; ++t) {
    detail::check_shared_sequence({result.trials.begin() + static_cast<std::ptrdiff_t>(t * planners),
                                   result.trials.begin() + static_cast<std::ptrdiff_t>((t + 1) * planners)});
  }

  const double trials = static_cast<double>(spec.trials);
  const std::size_t strides = spec.iterations / spec.stride;
  for (std::size_t k = 0; k < strides; ++k) {
    for (std::size_t p = 0; p < planners; ++p) {
      AggregateRow row;
      row.iteration = (k + 1) * spec.stride;
      row.planner = spec.planners[p];
      bool all_finite = true;
      for (std::size_t t = 0; t < spec.trials; ++t) {
        const StridePoint& pt = result.trials[t * planners + p].points[k];
        row.mean_cost += pt.best_cost;
        row.mean_obstaclefree_per_log_n += pt.obstaclefree_per_log_n;
        row.mean_walltime += pt.walltime;
        all_finite = all_finite && std::isfinite(pt.best_cost);
      }
      row.mean_cost /= trials;
      row.mean_obstaclefree_per_log_n /= trials;
      row.mean_walltime /= trials;
      if (all_finite) {
        for (std::size_t t = 0; t < spec.trials; ++t) {
          const double diff = result.trials[t * planners + p].points[k].best_cost - row.mean_cost;
          row.var_cost += diff * diff;
        }
        row.var_cost /= trials;
      } else {
        row.var_cost = std::numeric_limits<double>::quiet_NaN();
      }
      result.aggregate.push_back(row);
    }
  }

  const auto rrt = std::find(spec.planners.begin(), spec.planners.end(), PlannerKind::rrt);
  const std::size_t rrt_index = static_cast<std::size_t>(rrt - spec.planners.begin());
  const auto checkpoints = complexity_checkpoints(spec.iterations);
  for (std::size_t k = 0; k < checkpoints.size(); ++k) {
    for (std::size_t p = 0; p < planners; ++p) {
      ComplexityRow row;
      row.n = checkpoints[k];
      row.planner = spec.planners[p];
      double ratio = 0.0;
      for (std::size_t t = 0; t < spec.trials; ++t) {
        const StridePoint& pt = result.trials[t * planners + p].checkpoints[k];
        row.mean_obstaclefree_per_log_n += pt.obstaclefree_per_log_n;
        row.mean_walltime += pt.walltime;
        if (rrt != spec.planners.end()) {
          ratio += pt.walltime / result.trials[t * planners + rrt_index].checkpoints[k].walltime;
        }
      }
      row.mean_obstaclefree_per_log_n /= trials;
      row.mean_walltime /= trials;
      if (spec.timing && rrt != spec.planners.end()) row.time_ratio_vs_rrt = ratio / trials;
      result.complexity.push_back(row);
    }
  }

  if (spec.oracle_resolution != 0 && scenario.world.dimension() == 2) {
    result.oracle_cost = oracle_optimal_cost(scenario.world, scenario.cost, spec.oracle_resolution);
  }
  return result;
}

inline ExperimentResult run_experiment(const ExperimentSpec& spec,
                                       std::size_t workers = worker_count_from_env()) {
  spec.validate();
  return run_experiment(spec, load_scenario(spec.scenario), workers);
}

/// Complexity table for a spec (runs the experiment).
inline std::vector<ComplexityRow> complexity_report(const ExperimentSpec& spec,
                                                    std::size_t workers = worker_count_from_env()) {
  const bool has_rrt =
      std::find(spec.planners.begin(), spec.planners.end(), PlannerKind::rrt) != spec.planners.end();
  const bool has_other = std::any_of(spec.planners.begin(), spec.planners.end(), [](PlannerKind k) {
    return k == PlannerKind::rrg || k == PlannerKind::rrt_star;
  });
  if (!has_rrt || !has_other) {
    throw ValidationError({"complexity report needs rrt and one of rrg / rrt_star"});
  }
  return run_experiment(spec, workers).complexity;
}

/// Nine significant digits, C locale.
inline std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

inline std::string aggregate_csv(const std::vector<AggregateRow>& rows) {
  std::string out =
      "iteration,planner,mean_cost,var_cost,mean_obstaclefree_per_log_n,mean_walltime_s\n";
  for (const auto& r : rows) {
    out += std::to_string(r.iteration) + ',' + to_string(r.planner) + ',' + format_number(r.mean_cost) +
           ',' + format_number(r.var_cost) + ',' + format_number(r.mean_obstaclefree_per_log_n) + ',' +
           format_number(r.mean_walltime) + '\n';
  }
  return out;
}

inline std::string trial_csv(const std::vector<TrialRecord>& records) {
  std::string out = "iteration,planner,seed,best_cost,vertex_count,obstaclefree_per_log_n,walltime_s\n";
  for (const auto& rec : records) {
    for (const auto& p : rec.points) {
      out += std::to_string(p.iteration) + ',' + to_string(rec.planner) + ',' + std::to_string(rec.seed) +
             ',' + format_number(p.best_cost) + ',' + std::to_string(p.vertex_count) + ',' +
             format_number(p.obstaclefree_per_log_n) + ',' + format_number(p.walltime) + '\n';
    }
  }
  return out;
}

inline std::string complexity_csv(const std::vector<ComplexityRow>& rows) {
  std::string out = "n,planner,mean_obstaclefree_per_log_n,mean_walltime_s,time_ratio_vs_rrt\n";
  for (const auto& r : rows) {
    out += std::to_string(r.n) + ',' + to_string(r.planner) + ',' +
           format_number(r.mean_obstaclefree_per_log_n) + ',' + format_number(r.mean_walltime) + ',' +
           format_number(r.time_ratio_vs_rrt) + '\n';
  }
  return out;
}

inline void emit_csv(const std::vector<AggregateRow>& rows, const std::string& path) {
  write_text_file(path, aggregate_csv(rows));
}

/// aggregate.csv, complexity.csv and one trial_NNNN.csv per trial.
inline std::vector<std::string> write_experiment_outputs(const ExperimentResult& result,
                                                         const std::string& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir + ": " + ec.message());
  const std::filesystem::path dir(out_dir);
  std::vector<std::string> written;
  const auto put = [&](const std::string& name, const std::string& text) {
    const std::string path = (dir / name).string();
    write_text_file(path, text);
    written.push_back(path);
  };
  put("aggregate.csv", aggregate_csv(result.aggregate));
  put("complexity.csv", complexity_csv(result.complexity));
  const std::size_t planners = result.spec.planners.size();
  for (std::size_t t = 0; t < result.spec.trials; ++t) {
    char name[32];
    std::snprintf(name, sizeof name, "trial_%04zu.csv", t);
    put(name, trial_csv({result.trials.begin() + static_cast<std::ptrdiff_t>(t * planners),
                         result.trials.begin() + static_cast<std::ptrdiff_t>((t + 1) * planners)}));
  }
  return written;
}

}  // namespace optrrt
