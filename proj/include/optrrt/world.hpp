#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "optrrt/geometry.hpp"

namespace optrrt {

/// Raised when a problem instance is unusable (e.g. free space of measure zero).
class ConfigurationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Axis-aligned box [lo, hi] in R^d.
struct Box {
  std::vector<double> lo;
  std::vector<double> hi;

  std::size_t dimension() const noexcept { return lo.size(); }

  double volume() const noexcept {
    double v = 1.0;
    for (std::size_t k = 0; k < lo.size(); ++k) v *= hi[k] - lo[k];
    return v;
  }

  bool contains_closed(std::span<const double> x) const noexcept {
    for (std::size_t k = 0; k < lo.size(); ++k) {
      if (x[k] < lo[k] || x[k] > hi[k]) return false;
    }
    return true;
  }

  bool contains_open(std::span<const double> x) const noexcept {
    for (std::size_t k = 0; k < lo.size(); ++k) {
      if (!(x[k] > lo[k] && x[k] < hi[k])) return false;
    }
    return true;
  }

  /// True when the open interiors of the two boxes share a point.
  bool interiors_overlap(const Box& other) const noexcept {
    for (std::size_t k = 0; k < lo.size(); ++k) {
      if (!(std::max(lo[k], other.lo[k]) < std::min(hi[k], other.hi[k]))) return false;
    }
    return true;
  }

  bool contains_box(const Box& inner) const noexcept {
    for (std::size_t k = 0; k < lo.size(); ++k) {
      if (inner.lo[k] < lo[k] || inner.hi[k] > hi[k]) return false;
    }
    return true;
  }

  void validate(std::size_t d, const std::string& what) const {
    if (lo.size() != d || hi.size() != d) throw UsageError(what + ": wrong dimension");
    for (std::size_t k = 0; k < d; ++k) {
      if (!std::isfinite(lo[k]) || !std::isfinite(hi[k]) || !(lo[k] < hi[k])) {
        throw UsageError(what + ": needs finite lo < hi on every axis");
      }
    }
  }
};

/// Parameter interval of the segment a + t (b - a), t in [0, 1], that lies
/// in the closed box. Returns false when the segment misses it.
inline bool clip_segment_closed(const Box& box, std::span<const double> a,
                                std::span<const double> b, double& t_enter, double& t_exit) {
  t_enter = 0.0;
  t_exit = 1.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double dir = b[k] - a[k];
    if (dir == 0.0) {
      if (a[k] < box.lo[k] || a[k] > box.hi[k]) return false;
      continue;
    }
    double t0 = (box.lo[k] - a[k]) / dir;
    double t1 = (box.hi[k] - a[k]) / dir;
    if (t0 > t1) std::swap(t0, t1);
    t_enter = std::max(t_enter, t0);
    t_exit = std::min(t_exit, t1);
    if (t_enter > t_exit) return false;
  }
  return true;
}

/// Slab test against the open interior of a box. Touching a face, edge or
/// corner is not a collision.
inline bool segment_hits_open_box(const Box& box, std::span<const double> a,
                                  std::span<const double> b) noexcept {
  double t_enter = -std::numeric_limits<double>::infinity();
  double t_exit = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double dir = b[k] - a[k];
    if (dir == 0.0) {
      if (!(a[k] > box.lo[k] && a[k] < box.hi[k])) return false;
      continue;
    }
    double t0 = (box.lo[k] - a[k]) / dir;
    double t1 = (box.hi[k] - a[k]) / dir;
    if (t0 > t1) std::swap(t0, t1);
    t_enter = std::max(t_enter, t0);
    t_exit = std::min(t_exit, t1);
    if (!(t_enter < t_exit)) return false;
  }
  return t_enter < 1.0 && t_exit > 0.0;
}

struct GoalBall {
  std::vector<double> center;
  double radius = 0.0;
};

/// Goal region: a closed box or a closed ball.
using GoalRegion = std::variant<Box, GoalBall>;

/// Problem instance: bounds X, open obstacle boxes, goal region and x_init.
class WorldModel {
 public:
  WorldModel(Box bounds, std::vector<Box> obstacles, GoalRegion goal, Point x_init)
      : bounds_(std::move(bounds)),
        obstacles_(std::move(obstacles)),
        goal_(std::move(goal)),
        x_init_(std::move(x_init)) {
    const std::size_t d = bounds_.dimension();
    if (d < 2) throw UsageError("world dimension must be at least 2");
    bounds_.validate(d, "bounds");
    for (const Box& obstacle : obstacles_) obstacle.validate(d, "obstacle");
    if (x_init_.dimension() != d) throw UsageError("x_init: wrong dimension");
    if (!obstacle_free(x_init_)) throw UsageError("x_init must lie in free space");
    validate_goal();
  }

  std::size_t dimension() const noexcept { return bounds_.dimension(); }
  const Box& bounds() const noexcept { return bounds_; }
  const std::vector<Box>& obstacles() const noexcept { return obstacles_; }
  const GoalRegion& goal() const noexcept { return goal_; }
  const Point& x_init() const noexcept { return x_init_; }

  bool obstacle_free(std::span<const double> x) const noexcept {
    if (!bounds_.contains_closed(x)) return false;
    for (const Box& obstacle : obstacles_) {
      if (obstacle.contains_open(x)) return false;
    }
    return true;
  }
  bool obstacle_free(const Point& x) const {
    require_same_dimension(x.coords(), bounds_.lo);
    return obstacle_free(x.coords());
  }

  /// Exact test that [a, b] stays in the closure of the free space.
  /// Endpoints are put in lexicographic order first so the answer does not
  /// depend on argument order.
  bool obstacle_free(std::span<const double> a, std::span<const double> b) const noexcept {
    if (std::lexicographical_compare(b.begin(), b.end(), a.begin(), a.end())) std::swap(a, b);
    if (!bounds_.contains_closed(a) || !bounds_.contains_closed(b)) return false;
    for (const Box& obstacle : obstacles_) {
      if (segment_hits_open_box(obstacle, a, b)) return false;
    }
    return true;
  }
  bool obstacle_free(const Point& a, const Point& b) const {
    require_same_dimension(a.coords(), bounds_.lo);
    require_same_dimension(b.coords(), bounds_.lo);
    return obstacle_free(a.coords(), b.coords());
  }

  bool in_goal(std::span<const double> x) const noexcept {
    if (const auto* box = std::get_if<Box>(&goal_)) return box->contains_closed(x);
    const auto& ball = std::get<GoalBall>(goal_);
    return squared_distance(x, ball.center) <= ball.radius * ball.radius;
  }
  bool in_goal(const Point& x) const {
    require_same_dimension(x.coords(), bounds_.lo);
    return in_goal(x.coords());
  }

  double bounds_diagonal() const noexcept { return distance(bounds_.lo, bounds_.hi); }

 private:
  void validate_goal() const {
    const std::size_t d = dimension();
    if (const auto* box = std::get_if<Box>(&goal_)) {
      box->validate(d, "goal");
      if (!bounds_.contains_box(*box)) throw UsageError("goal box must lie inside bounds");
      for (const Box& obstacle : obstacles_) {
        if (obstacle.interiors_overlap(*box)) throw UsageError("goal overlaps an obstacle");
      }
      return;
    }
    const auto& ball = std::get<GoalBall>(goal_);
    if (ball.center.size() != d) throw UsageError("goal ball: wrong dimension");
    if (!(ball.radius > 0.0) || !std::isfinite(ball.radius)) {
      throw UsageError("goal ball: radius must be positive");
    }
    if (!bounds_.contains_closed(ball.center)) throw UsageError("goal ball center outside bounds");
    for (const Box& obstacle : obstacles_) {
      double sq = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        const double c = std::clamp(ball.center[k], obstacle.lo[k], obstacle.hi[k]);
        sq += (c - ball.center[k]) * (c - ball.center[k]);
      }
      if (sq < ball.radius * ball.radius) throw UsageError("goal overlaps an obstacle");
    }
  }

  Box bounds_;
  std::vector<Box> obstacles_;
  GoalRegion goal_;
  Point x_init_;
};

/// Seeded source of uniform draws. The generator is MT19937-64 and reals
/// come from the top 53 bits, so sequences are identical on every platform.
class SampleStream {
 public:
  explicit SampleStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }
  /// Accepted samples handed out so far.
  std::uint64_t counter() const noexcept { return counter_; }
  /// Raw generator outputs consumed so far, including rejected draws.
  std::uint64_t raw_draws() const noexcept { return raw_draws_; }

  /// Uniform in [0, 1).
  double uniform() noexcept {
    ++raw_draws_;
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  void note_accepted() noexcept { ++counter_; }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
  std::uint64_t raw_draws_ = 0;
  std::mt19937_64 engine_;
};

inline constexpr std::uint64_t kMaxConsecutiveRejections = 1'000'000;

/// Uniform draw over the free space by rejection from the bounding box.
inline Point sample_free(const WorldModel& world, SampleStream& stream) {
  const Box& b = world.bounds();
  std::vector<double> x(world.dimension());
  for (std::uint64_t attempt = 0; attempt <= kMaxConsecutiveRejections; ++attempt) {
    for (std::size_t k = 0; k < x.size(); ++k) x[k] = b.lo[k] + (b.hi[k] - b.lo[k]) * stream.uniform();
    if (world.obstacle_free(std::span<const double>(x))) {
      stream.note_accepted();
      return Point(std::move(x));
    }
  }
  throw ConfigurationError("sample_free: more than 1e6 consecutive rejections; free space has "
                           "(near) zero measure");
}

/// Lebesgue measure of the free space: bounds volume minus the exact volume
/// of the union of obstacles clipped to the bounds (coordinate compression).
inline double free_space_measure(const WorldModel& world) {
  const std::size_t d = world.dimension();
  const Box& bounds = world.bounds();
  std::vector<Box> clipped;
  for (const Box& o : world.obstacles()) {
    Box c{std::vector<double>(d), std::vector<double>(d)};
    bool empty = false;
    for (std::size_t k = 0; k < d; ++k) {
      c.lo[k] = std::max(o.lo[k], bounds.lo[k]);
      c.hi[k] = std::min(o.hi[k], bounds.hi[k]);
      if (!(c.lo[k] < c.hi[k])) empty = true;
    }
    if (!empty) clipped.push_back(std::move(c));
  }
  if (clipped.empty()) return bounds.volume();

  std::vector<std::vector<double>> cuts(d);
  for (std::size_t k = 0; k < d; ++k) {
    for (const Box& c : clipped) {
      cuts[k].push_back(c.lo[k]);
      cuts[k].push_back(c.hi[k]);
    }
    std::sort(cuts[k].begin(), cuts[k].end());
    cuts[k].erase(std::unique(cuts[k].begin(), cuts[k].end()), cuts[k].end());
  }

  // Walk every cell of the compressed grid; a cell is covered iff its
  // midpoint lies inside some clipped obstacle.
  double covered = 0.0;
  std::vector<std::size_t> cell(d, 0);
  std::vector<double> mid(d);
  while (true) {
    double vol = 1.0;
    for (std::size_t k = 0; k < d; ++k) {
      const double lo = cuts[k][cell[k]];
      const double hi = cuts[k][cell[k] + 1];
      mid[k] = 0.5 * (lo + hi);
      vol *= hi - lo;
    }
    for (const Box& c : clipped) {
      if (c.contains_open(mid)) {
        covered += vol;
        break;
      }
    }
    std::size_t axis = 0;
    while (axis < d && ++cell[axis] + 1 >= cuts[axis].size()) cell[axis++] = 0;
    if (axis == d) break;
  }
  return bounds.volume() - covered;
}

}  // namespace optrrt
