#pragma once

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "optrrt/cost_model.hpp"
#include "optrrt/geometry.hpp"
#include "optrrt/kd_index.hpp"
#include "optrrt/world.hpp"

namespace optrrt {

enum class PlannerKind { rrt, rrg, rrt_star, prm_star };

inline const char* to_string(PlannerKind kind) noexcept {
  switch (kind) {
    case PlannerKind::rrt: return "rrt";
    case PlannerKind::rrg: return "rrg";
    case PlannerKind::rrt_star: return "rrt_star";
    case PlannerKind::prm_star: return "prm_star";
  }
  return "?";
}

inline std::optional<PlannerKind> parse_planner_kind(std::string_view name) noexcept {
  if (name == "rrt") return PlannerKind::rrt;
  if (name == "rrg") return PlannerKind::rrg;
  if (name == "rrt_star") return PlannerKind::rrt_star;
  if (name == "prm_star") return PlannerKind::prm_star;
  return std::nullopt;
}

inline bool is_tree(PlannerKind kind) noexcept {
  return kind == PlannerKind::rrt || kind == PlannerKind::rrt_star;
}

/// Volume of the unit ball in R^d.
inline double unit_ball_volume(std::size_t d) {
  const double half = static_cast<double>(d) / 2.0;
  return std::pow(std::numbers::pi, half) / std::tgamma(half + 1.0);
}

/// 2^d (1 + 1/d) mu(X_free): the Near constant must exceed this for
/// asymptotic optimality.
inline double gamma_lower_bound(const WorldModel& world) {
  const double d = static_cast<double>(world.dimension());
  return std::pow(2.0, d) * (1.0 + 1.0 / d) * free_space_measure(world);
}

struct NearParams {
  std::size_t dimension = 2;
  double eta = 1.0;
  double gamma = 1.0;
  double zeta = std::numbers::pi;

  static NearParams make(std::size_t dimension, double eta, double gamma) {
    if (dimension < 2) throw UsageError("near params: dimension must be at least 2");
    if (!(eta > 0.0) || !std::isfinite(eta)) throw UsageError("near params: eta must be positive");
    if (!(gamma > 0.0) || !std::isfinite(gamma)) {
      throw UsageError("near params: gamma must be positive");
    }
    return {dimension, eta, gamma, unit_ball_volume(dimension)};
  }

  /// eta defaults to a tenth of the bounds diagonal, gamma to
  /// `gamma_multiplier` times the optimality threshold.
  static NearParams for_world(const WorldModel& world, double gamma_multiplier = 1.1,
                              std::optional<double> eta = std::nullopt) {
    return make(world.dimension(), eta.value_or(0.1 * world.bounds_diagonal()),
                gamma_multiplier * gamma_lower_bound(world));
  }
};

/// r_n = min{(gamma / zeta_d * log n / n)^(1/d), eta}; n = 1 yields eta.
inline double near_radius(const NearParams& p, std::size_t n) {
  if (n == 0) throw UsageError("near_radius: n must be at least 1");
  if (n == 1) return p.eta;
  const double nd = static_cast<double>(n);
  const double r = std::pow(p.gamma / p.zeta * std::log(nd) / nd, 1.0 / static_cast<double>(p.dimension));
  return std::min(r, p.eta);
}

inline constexpr VertexId kNoVertex = std::numeric_limits<VertexId>::max();

enum class GraphMode { tree, symmetric };

/// Vertices, directed edges and cost bookkeeping shared by every planner.
///
/// Tree mode: `neighbors(v)` are the children of v, `parent(v)` its unique
/// parent and `cost_to_come(v)` the cost along parent pointers. Symmetric
/// mode: every edge is stored in both directions and `cost_to_come(v)` is the
/// shortest-path distance from the root, maintained incrementally.
class PlannerGraph {
 public:
  PlannerGraph(GraphMode mode, const Point& root, bool root_in_goal, double kd_epsilon = 0.0)
      : mode_(mode), index_(root.dimension(), kd_epsilon) {
    add_vertex(root, root_in_goal);
    cost_[0] = 0.0;
    note_cost(0);
  }

  GraphMode mode() const noexcept { return mode_; }
  std::size_t size() const noexcept { return vertices_.size(); }
  const Point& vertex(VertexId v) const { return vertices_[v]; }
  const std::vector<Point>& vertices() const noexcept { return vertices_; }
  std::span<const VertexId> neighbors(VertexId v) const { return adjacency_[v]; }
  VertexId parent(VertexId v) const { return parent_[v]; }
  double cost_to_come(VertexId v) const { return cost_[v]; }
  double edge_cost(VertexId v) const { return edge_cost_[v]; }
  bool is_goal(VertexId v) const { return goal_[v] != 0; }
  const KdIndex& index() const noexcept { return index_; }

  /// Y: cheapest known cost over goal vertices (+inf before the first).
  double best_cost() const noexcept { return best_cost_; }
  VertexId best_vertex() const noexcept { return best_vertex_; }

  std::size_t edge_count() const noexcept {
    std::size_t n = 0;
    for (const auto& a : adjacency_) n += a.size();
    return n;
  }

  /// Directed edge list, sorted.
  std::vector<std::pair<VertexId, VertexId>> edges() const {
    std::vector<std::pair<VertexId, VertexId>> out;
    out.reserve(edge_count());
    for (VertexId u = 0; u < adjacency_.size(); ++u) {
      for (VertexId v : adjacency_[u]) out.emplace_back(u, v);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  /// Running total of ObstacleFree calls made while building this graph.
  std::uint64_t obstacle_checks() const noexcept { return obstacle_checks_; }
  void count_obstacle_checks(std::uint64_t n) noexcept { obstacle_checks_ += n; }

  VertexId add_vertex(const Point& p, bool in_goal) {
    const auto id = static_cast<VertexId>(vertices_.size());
    index_.insert(p.coords(), id);
    vertices_.push_back(p);
    adjacency_.emplace_back();
    parent_.push_back(kNoVertex);
    cost_.push_back(std::numeric_limits<double>::infinity());
    edge_cost_.push_back(0.0);
    goal_.push_back(in_goal ? 1 : 0);
    return id;
  }

  /// Tree mode: hang a fresh vertex below `parent`.
  void attach(VertexId child, VertexId parent, double edge_cost) {
    parent_[child] = parent;
    edge_cost_[child] = edge_cost;
    adjacency_[parent].push_back(child);
    cost_[child] = cost_[parent] + edge_cost;
    note_cost(child);
  }

  /// Tree mode: move `child` under `new_parent` and refresh the cost of its
  /// whole subtree so cost_to_come matches the parent chain everywhere.
  void rewire(VertexId child, VertexId new_parent, double edge_cost) {
    auto& siblings = adjacency_[parent_[child]];
    siblings.erase(std::find(siblings.begin(), siblings.end(), child));
    parent_[child] = new_parent;
    edge_cost_[child] = edge_cost;
    adjacency_[new_parent].push_back(child);
    std::vector<VertexId> stack{child};
    while (!stack.empty()) {
      const VertexId v = stack.back();
      stack.pop_back();
      cost_[v] = cost_[parent_[v]] + edge_cost_[v];
      note_cost(v);
      stack.insert(stack.end(), adjacency_[v].begin(), adjacency_[v].end());
    }
  }

  /// Symmetric mode: add the edge pair (u, v), (v, u).
  void connect(VertexId u, VertexId v) {
    adjacency_[u].push_back(v);
    adjacency_[v].push_back(u);
  }

  /// Symmetric mode: after `v` was added with its edges, set its distance
  /// and push every resulting decrease through the graph (edge insertions
  /// only ever lower distances).
  void propagate_distances(VertexId v, const CostModel& cost) {
    using Entry = std::pair<double, VertexId>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
    for (VertexId u : adjacency_[v]) {
      const double c = cost_[u] + cost.segment_cost(vertices_[u].coords(), vertices_[v].coords());
      if (c < cost_[v]) cost_[v] = c;
    }
    note_cost(v);
    queue.emplace(cost_[v], v);
    while (!queue.empty()) {
      const auto [d, u] = queue.top();
      queue.pop();
      if (d > cost_[u]) continue;
      for (VertexId w : adjacency_[u]) {
        const double c = d + cost.segment_cost(vertices_[u].coords(), vertices_[w].coords());
        if (c < cost_[w]) {
          cost_[w] = c;
          note_cost(w);
          queue.emplace(c, w);
        }
      }
    }
  }

  /// Symmetric mode: recompute every distance from scratch (Dijkstra).
  void recompute_distances(const CostModel& cost) {
    std::fill(cost_.begin(), cost_.end(), std::numeric_limits<double>::infinity());
    best_cost_ = std::numeric_limits<double>::infinity();
    best_vertex_ = kNoVertex;
    cost_[0] = 0.0;
    note_cost(0);
    using Entry = std::pair<double, VertexId>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
    queue.emplace(0.0, 0);
    while (!queue.empty()) {
      const auto [d, u] = queue.top();
      queue.pop();
      if (d > cost_[u]) continue;
      for (VertexId w : adjacency_[u]) {
        const double c = d + cost.segment_cost(vertices_[u].coords(), vertices_[w].coords());
        if (c < cost_[w]) {
          cost_[w] = c;
          note_cost(w);
          queue.emplace(c, w);
        }
      }
    }
  }

 private:
  void note_cost(VertexId v) noexcept {
    if (goal_[v] && cost_[v] < best_cost_) {
      best_cost_ = cost_[v];
      best_vertex_ = v;
    }
  }

  GraphMode mode_;
  KdIndex index_;
  std::vector<Point> vertices_;
  std::vector<std::vector<VertexId>> adjacency_;
  std::vector<VertexId> parent_;
  std::vector<double> cost_;
  std::vector<double> edge_cost_;
  std::vector<std::uint8_t> goal_;
  double best_cost_ = std::numeric_limits<double>::infinity();
  VertexId best_vertex_ = kNoVertex;
  std::uint64_t obstacle_checks_ = 0;
};

/// Everything an extend step reads besides the graph.
struct Problem {
  const WorldModel& world;
  const CostModel& cost;
  NearParams near;
  bool track_cost = true;
};

struct ExtendResult {
  bool added = false;
  VertexId vertex = kNoVertex;
  std::uint32_t obstacle_checks = 0;
};

namespace detail {

/// Shared first half of every extend: nearest vertex, steer, collision
/// check. Samples that coincide with a vertex are skipped outright.
struct NearestStep {
  VertexId nearest = kNoVertex;
  std::optional<Point> x_new;
  std::uint32_t checks = 0;
};

inline NearestStep extend_nearest(const PlannerGraph& g, const Problem& p, const Point& x) {
  NearestStep step;
  const auto hit = g.index().nearest(x.coords());
  if (hit.distance == 0.0) return step;
  step.nearest = hit.id;
  Point x_new = steer(g.vertex(hit.id), x, p.near.eta);
  step.checks = 1;
  if (p.world.obstacle_free(g.vertex(hit.id).coords(), x_new.coords())) step.x_new = std::move(x_new);
  return step;
}

}  // namespace detail

/// Extend the nearest vertex toward x and keep the new vertex if the
/// connecting segment is collision free.
inline ExtendResult rrt_extend(PlannerGraph& g, const Problem& p, const Point& x) {
  auto step = detail::extend_nearest(g, p, x);
  ExtendResult result{false, kNoVertex, step.checks};
  g.count_obstacle_checks(result.obstacle_checks);
  if (!step.x_new) return result;
  const Point& from = g.vertex(step.nearest);
  const double c = p.cost.segment_cost(from.coords(), step.x_new->coords());
  const bool goal = p.world.in_goal(step.x_new->coords());
  result.vertex = g.add_vertex(*step.x_new, goal);
  g.attach(result.vertex, step.nearest, c);
  result.added = true;
  return result;
}

/// As rrt_extend, then also connect every collision-free vertex inside the
/// Near ball (radius from the vertex count before insertion) both ways.
inline ExtendResult rrg_extend(PlannerGraph& g, const Problem& p, const Point& x) {
  auto step = detail::extend_nearest(g, p, x);
  ExtendResult result{false, kNoVertex, step.checks};
  if (!step.x_new) {
    g.count_obstacle_checks(result.obstacle_checks);
    return result;
  }
  const Point x_new = std::move(*step.x_new);
  const auto near = g.index().near(x_new.coords(), near_radius(p.near, g.size()));
  const VertexId id = g.add_vertex(x_new, p.world.in_goal(x_new.coords()));
  g.connect(step.nearest, id);
  for (VertexId v : near) {
    ++result.obstacle_checks;
    if (p.world.obstacle_free(x_new.coords(), g.vertex(v).coords()) && v != step.nearest) {
      g.connect(v, id);
    }
  }
  if (p.track_cost) g.propagate_distances(id, p.cost);
  g.count_obstacle_checks(result.obstacle_checks);
  result.added = true;
  result.vertex = id;
  return result;
}

/// Tree variant of rrg_extend: x_new takes the cheapest collision-free
/// parent in {x_nearest} and the Near set, then every Near vertex that gets
/// strictly cheaper through x_new is re-parented under it.
inline ExtendResult rrt_star_extend(PlannerGraph& g, const Problem& p, const Point& x) {
  auto step = detail::extend_nearest(g, p, x);
  ExtendResult result{false, kNoVertex, step.checks};
  if (!step.x_new) {
    g.count_obstacle_checks(result.obstacle_checks);
    return result;
  }
  const Point x_new = std::move(*step.x_new);
  const auto near = g.index().near(x_new.coords(), near_radius(p.near, g.size()));

  VertexId best_parent = step.nearest;
  double best_edge = p.cost.segment_cost(g.vertex(step.nearest).coords(), x_new.coords());
  double best_cost = g.cost_to_come(step.nearest) + best_edge;
  std::vector<std::uint8_t> reachable(near.size(), 0);
  std::vector<double> edge(near.size(), 0.0);
  for (std::size_t i = 0; i < near.size(); ++i) {
    const VertexId v = near[i];
    ++result.obstacle_checks;
    if (!p.world.obstacle_free(g.vertex(v).coords(), x_new.coords())) continue;
    reachable[i] = 1;
    edge[i] = p.cost.segment_cost(g.vertex(v).coords(), x_new.coords());
    const double c = g.cost_to_come(v) + edge[i];
    if (c < best_cost) {
      best_cost = c;
      best_parent = v;
      best_edge = edge[i];
    }
  }

  const VertexId id = g.add_vertex(x_new, p.world.in_goal(x_new.coords()));
  g.attach(id, best_parent, best_edge);

  // The rewire pass reuses the collision results above; segment tests and
  // costs are symmetric in their endpoints.
  for (std::size_t i = 0; i < near.size(); ++i) {
    const VertexId v = near[i];
    if (v == best_parent || !reachable[i]) continue;
    if (g.cost_to_come(v) > g.cost_to_come(id) + edge[i]) g.rewire(v, id, edge[i]);
  }
  g.count_obstacle_checks(result.obstacle_checks);
  result.added = true;
  result.vertex = id;
  return result;
}

struct RunOptions {
  /// Maintain Y_i every iteration. Only RRG pays noticeably for this.
  bool track_cost = true;
  bool record_timing = true;
  double kd_epsilon = 0.0;
  /// Called after each iteration with the 1-based iteration index.
  std::function<void(const PlannerGraph&, std::size_t)> observer;
};

/// Per-iteration series of one seeded run. Index i holds iteration i + 1.
struct RunResult {
  PlannerKind kind;
  std::uint64_t seed;
  PlannerGraph graph;
  std::vector<double> best_cost;
  std::vector<std::uint32_t> vertex_count;
  std::vector<std::uint32_t> obstacle_checks;
  std::vector<double> walltime;
  /// FNV-1a over the bit patterns of every sample consumed, in order.
  std::uint64_t sample_hash;
};

inline constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;

inline std::uint64_t fnv1a_mix(std::uint64_t hash, std::uint64_t word) noexcept {
  for (int byte = 0; byte < 8; ++byte) {
    hash ^= (word >> (8 * byte)) & 0xffU;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

inline std::uint64_t hash_point(std::uint64_t hash, const Point& p) noexcept {
  for (double c : p.coords()) hash = fnv1a_mix(hash, std::bit_cast<std::uint64_t>(c));
  return hash;
}

/// N iterations of sample + extend for one of the incremental planners.
/// Deterministic in (scenario, kind, params, N, seed) apart from walltime.
inline RunResult run(const WorldModel& world, const CostModel& cost, PlannerKind kind,
                     const NearParams& params, std::size_t iterations, std::uint64_t seed,
                     const RunOptions& options = {}) {
  if (iterations == 0) throw UsageError("run: iteration count must be at least 1");
  if (params.dimension != world.dimension()) throw UsageError("run: params dimension mismatch");
  ExtendResult (*extend)(PlannerGraph&, const Problem&, const Point&) = nullptr;
  switch (kind) {
    case PlannerKind::rrt: extend = &rrt_extend; break;
    case PlannerKind::rrg: extend = &rrg_extend; break;
    case PlannerKind::rrt_star: extend = &rrt_star_extend; break;
    case PlannerKind::prm_star: throw UsageError("run: prm_star is built with prm_star_build");
  }
  const GraphMode mode = is_tree(kind) ? GraphMode::tree : GraphMode::symmetric;
  RunResult result{kind,
                   seed,
                   PlannerGraph(mode, world.x_init(), world.in_goal(world.x_init()), options.kd_epsilon),
                   {},
                   {},
                   {},
                   {},
                   kFnvOffset};
  result.best_cost.reserve(iterations);
  result.vertex_count.reserve(iterations);
  result.obstacle_checks.reserve(iterations);
  if (options.record_timing) result.walltime.reserve(iterations);

  const Problem problem{world, cost, params, options.track_cost};
  SampleStream stream(seed);
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  for (std::size_t i = 1; i <= iterations; ++i) {
    const Point x = sample_free(world, stream);
    result.sample_hash = hash_point(result.sample_hash, x);
    const ExtendResult step = extend(result.graph, problem, x);
    result.best_cost.push_back(result.graph.best_cost());
    result.vertex_count.push_back(static_cast<std::uint32_t>(result.graph.size()));
    result.obstacle_checks.push_back(step.obstacle_checks);
    if (options.record_timing) {
      result.walltime.push_back(std::chrono::duration<double>(Clock::now() - start).count());
    }
    if (options.observer) options.observer(result.graph, i);
  }
  return result;
}

/// Batch roadmap: x_init plus n free samples; every pair closer than
/// (gamma / zeta_d * log n / n)^(1/d) is joined both ways when collision
/// free. Distances from x_init are filled in before returning.
inline PlannerGraph prm_star_build(const WorldModel& world, const CostModel& cost,
                                   const NearParams& params, std::size_t n, std::uint64_t seed) {
  if (n < 2) throw UsageError("prm_star_build: need at least 2 samples");
  if (params.dimension != world.dimension()) {
    throw UsageError("prm_star_build: params dimension mismatch");
  }
  PlannerGraph g(GraphMode::symmetric, world.x_init(), world.in_goal(world.x_init()));
  SampleStream stream(seed);
  for (std::size_t i = 0; i < n; ++i) {
    const Point x = sample_free(world, stream);
    g.add_vertex(x, world.in_goal(x.coords()));
  }
  const double nd = static_cast<double>(n);
  const double radius =
      std::pow(params.gamma / params.zeta * std::log(nd) / nd, 1.0 / static_cast<double>(params.dimension));
  std::uint64_t checks = 0;
  for (VertexId u = 0; u < g.size(); ++u) {
    for (VertexId v : g.index().near(g.vertex(u).coords(), radius)) {
      if (v <= u) continue;
      ++checks;
      if (world.obstacle_free(g.vertex(u).coords(), g.vertex(v).coords())) g.connect(u, v);
    }
  }
  g.count_obstacle_checks(checks);
  g.recompute_distances(cost);
  return g;
}

}  // namespace optrrt
