#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <queue>
#include <utility>
#include <vector>

#include "optrrt/cost_model.hpp"
#include "optrrt/geometry.hpp"
#include "optrrt/planners.hpp"
#include "optrrt/world.hpp"

namespace optrrt {

struct PathResult {
  Polyline waypoints;
  double cost = std::numeric_limits<double>::infinity();
  bool found = false;
};

namespace detail {

inline PathResult not_found(const WorldModel& world) {
  return {Polyline({world.x_init()}), std::numeric_limits<double>::infinity(), false};
}

/// Follow `prev` from `target` back to the root and price the result.
inline PathResult trace(const PlannerGraph& g, const CostModel& cost,
                        const std::vector<VertexId>& prev, VertexId target) {
  std::vector<Point> points;
  for (VertexId v = target; v != kNoVertex; v = prev[v]) points.push_back(g.vertex(v));
  std::reverse(points.begin(), points.end());
  Polyline path(std::move(points));
  const double c = cost.path_cost(path);
  return {std::move(path), c, true};
}

}  // namespace detail

/// Cheapest root-to-goal path along parent pointers. Every goal vertex is
/// priced by walking its chain, independent of the cached cost_to_come.
inline PathResult best_tree_path(const PlannerGraph& g, const WorldModel& world,
                                 const CostModel& cost) {
  if (g.mode() != GraphMode::tree) throw UsageError("best_tree_path needs a tree");
  std::vector<VertexId> prev(g.size());
  for (VertexId v = 0; v < g.size(); ++v) prev[v] = g.parent(v);
  double best = std::numeric_limits<double>::infinity();
  VertexId target = kNoVertex;
  for (VertexId v = 0; v < g.size(); ++v) {
    if (!world.in_goal(g.vertex(v).coords())) continue;
    double c = 0.0;
    for (VertexId u = v; prev[u] != kNoVertex; u = prev[u]) {
      c += cost.segment_cost(g.vertex(prev[u]).coords(), g.vertex(u).coords());
    }
    if (c < best) {
      best = c;
      target = v;
    }
  }
  if (target == kNoVertex) return detail::not_found(world);
  return detail::trace(g, cost, prev, target);
}

/// Dijkstra from x_init (vertex 0) over segment costs, to the cheapest goal
/// vertex. Equal costs resolve to the smaller vertex id.
inline PathResult best_graph_path(const PlannerGraph& g, const WorldModel& world,
                                  const CostModel& cost) {
  const std::size_t n = g.size();
  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  std::vector<VertexId> prev(n, kNoVertex);
  using Entry = std::pair<double, VertexId>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
  dist[0] = 0.0;
  queue.emplace(0.0, 0);
  while (!queue.empty()) {
    const auto [d, u] = queue.top();
    queue.pop();
    if (d > dist[u]) continue;
    for (VertexId w : g.neighbors(u)) {
      const double c = d + cost.segment_cost(g.vertex(u).coords(), g.vertex(w).coords());
      if (c < dist[w] || (c == dist[w] && u < prev[w])) {
        const bool improved = c < dist[w];
        dist[w] = c;
        prev[w] = u;
        if (improved) queue.emplace(c, w);
      }
    }
  }
  VertexId target = kNoVertex;
  for (VertexId v = 0; v < n; ++v) {
    if (world.in_goal(g.vertex(v).coords()) && dist[v] < std::numeric_limits<double>::infinity() &&
        (target == kNoVertex || dist[v] < dist[target])) {
      target = v;
    }
  }
  if (target == kNoVertex) return detail::not_found(world);
  return detail::trace(g, cost, prev, target);
}

/// Grid upper bound on the optimal cost for planar worlds.
///
/// Nodes sit at lo + (hi - lo) * i / resolution for i = 0..resolution on each
/// axis, so the node set at resolution r is contained in the one at 2r. Nodes
/// and chords must avoid the closed obstacles: on the lattice, paths sliding
/// along an obstacle face would otherwise be admitted. Nodes link to their 16-connected
/// neighbours (offsets (1,0), (1,1), (1,2) and their symmetric images)
/// whenever the chord is clear, weighted by segment_cost. x_init
/// links to usable nodes within 1/32 of the bounds extent on each axis. The
/// search stops at the first settled node inside the goal; +inf when none is
/// reachable. Every coarse path survives refinement, so the value never
/// increases when the resolution doubles.
inline double oracle_optimal_cost(const WorldModel& world, const CostModel& cost,
                                  std::size_t resolution) {
  if (world.dimension() != 2) throw UsageError("oracle_optimal_cost supports d = 2 only");
  if (resolution < 64) throw UsageError("oracle_optimal_cost: resolution must be >= 64");
  const Box& b = world.bounds();
  const auto res = static_cast<std::int64_t>(resolution);
  const std::int64_t side = res + 1;
  const auto frac = [res](std::int64_t i) { return static_cast<double>(i) / static_cast<double>(res); };
  const auto node = [&](std::int64_t i, std::int64_t j) {
    return std::array<double, 2>{b.lo[0] + (b.hi[0] - b.lo[0]) * frac(i), b.lo[1] + (b.hi[1] - b.lo[1]) * frac(j)};
  };
  const auto index = [side](std::int64_t i, std::int64_t j) { return static_cast<std::size_t>(i * side + j); };

  const auto clear = [&world](std::span<const double> a, std::span<const double> c) {
    if (!world.obstacle_free(a, c)) return false;
    double t0 = 0.0;
    double t1 = 0.0;
    for (const Box& o : world.obstacles()) {
      if (clip_segment_closed(o, a, c, t0, t1)) return false;
    }
    return true;
  };

  std::vector<std::uint8_t> usable(static_cast<std::size_t>(side * side), 0);
  for (std::int64_t i = 0; i < side; ++i) {
    for (std::int64_t j = 0; j < side; ++j) {
      const auto p = node(i, j);
      usable[index(i, j)] = clear(p, p) ? 1 : 0;
    }
  }

  std::vector<double> dist(usable.size(), std::numeric_limits<double>::infinity());
  using Entry = std::pair<double, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;

  const auto& x0 = world.x_init();
  const double fx = (x0[0] - b.lo[0]) / (b.hi[0] - b.lo[0]);
  const double fy = (x0[1] - b.lo[1]) / (b.hi[1] - b.lo[1]);
  constexpr double kWindow = 1.0 / 32.0;
  for (std::int64_t i = 0; i < side; ++i) {
    if (std::abs(frac(i) - fx) > kWindow) continue;
    for (std::int64_t j = 0; j < side; ++j) {
      if (std::abs(frac(j) - fy) > kWindow || !usable[index(i, j)]) continue;
      const auto p = node(i, j);
      if (!clear(x0.coords(), p)) continue;
      const double d = cost.segment_cost(x0.coords(), std::span<const double>(p));
      if (d < dist[index(i, j)]) {
        dist[index(i, j)] = d;
        queue.emplace(d, index(i, j));
      }
    }
  }

  static constexpr std::array<std::array<int, 2>, 16> kStencil{{{1, 0}, {-1, 0}, {0, 1}, {0, -1},
                                                               {1, 1}, {1, -1}, {-1, 1}, {-1, -1},
                                                               {1, 2}, {2, 1}, {-1, 2}, {-2, 1},
                                                               {1, -2}, {2, -1}, {-1, -2}, {-2, -1}}};
  while (!queue.empty()) {
    const auto [d, u] = queue.top();
    queue.pop();
    if (d > dist[u]) continue;
    const auto i = static_cast<std::int64_t>(u) / side;
    const auto j = static_cast<std::int64_t>(u) % side;
    const auto pu = node(i, j);
    if (world.in_goal(std::span<const double>(pu))) return d;
    for (const auto& step : kStencil) {
      const std::int64_t ni = i + step[0];
      const std::int64_t nj = j + step[1];
      if (ni < 0 || nj < 0 || ni >= side || nj >= side || !usable[index(ni, nj)]) continue;
      const auto pv = node(ni, nj);
      if (!clear(pu, pv)) continue;
      const double c = d + cost.segment_cost(std::span<const double>(pu), std::span<const double>(pv));
      if (c < dist[index(ni, nj)]) {
        dist[index(ni, nj)] = c;
        queue.emplace(c, index(ni, nj));
      }
    }
  }
  return std::numeric_limits<double>::infinity();
}

}  // namespace optrrt
