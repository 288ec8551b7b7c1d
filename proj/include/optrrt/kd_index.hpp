#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <unordered_set>
#include <utility>
#include <vector>

#include "optrrt/geometry.hpp"

namespace optrrt {

using VertexId = std::uint32_t;

/// Raised by queries that have no meaningful answer (nearest on an empty index).
class QueryError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Per-query instrumentation.
struct QueryStats {
  std::uint64_t visited_nodes = 0;
};

/// Incremental kd-tree keyed by vertex id.
///
/// Every stored point is a node. New points descend to a leaf; the whole tree
/// is rebuilt around coordinate medians each time the size doubles, which
/// keeps the expected depth logarithmic. Each node carries the bounding box
/// of its subtree so both queries can prune and the range query can accept
/// whole subtrees at once.
///
/// Ties in nearest() go to the smallest id. Distances are compared as squared
/// sums, so near() membership is `squared_distance(p, q) <= r * r`.
class KdIndex {
 public:
  struct Neighbor {
    VertexId id;
    double distance;
  };

  explicit KdIndex(std::size_t dimension, double epsilon = 0.0)
      : dim_(dimension), epsilon_(epsilon) {
    if (dimension == 0) throw UsageError("kd index dimension must be positive");
    if (!(epsilon >= 0.0)) throw UsageError("kd index epsilon must be nonnegative");
  }

  std::size_t dimension() const noexcept { return dim_; }
  double epsilon() const noexcept { return epsilon_; }
  std::size_t size() const noexcept { return ids_.size(); }
  bool empty() const noexcept { return ids_.empty(); }

  void insert(std::span<const double> p, VertexId id) {
    if (p.size() != dim_) throw UsageError("kd index insert: dimension mismatch");
    if (!used_ids_.insert(id).second) throw UsageError("kd index insert: duplicate id");
    const std::uint32_t node = static_cast<std::uint32_t>(ids_.size());
    coords_.insert(coords_.end(), p.begin(), p.end());
    box_lo_.insert(box_lo_.end(), p.begin(), p.end());
    box_hi_.insert(box_hi_.end(), p.begin(), p.end());
    ids_.push_back(id);
    left_.push_back(kNil);
    right_.push_back(kNil);
    axis_.push_back(0);

    if (ids_.size() >= next_rebuild_) {
      rebuild();
      next_rebuild_ = 2 * ids_.size();
      return;
    }
    if (root_ == kNil) {
      root_ = node;
      return;
    }
    std::uint32_t cur = root_;
    while (true) {
      grow_box(cur, p);
      const std::uint32_t ax = axis_[cur];
      std::uint32_t& child = p[ax] < coord(cur, ax) ? left_[cur] : right_[cur];
      if (child == kNil) {
        child = node;
        axis_[node] = static_cast<std::uint8_t>((ax + 1) % dim_);
        return;
      }
      cur = child;
    }
  }
  void insert(const Point& p, VertexId id) { insert(p.coords(), id); }

  /// Exact nearest neighbour (epsilon = 0) or one within (1 + epsilon) of it.
  Neighbor nearest(std::span<const double> q, QueryStats* stats = nullptr) const {
    if (q.size() != dim_) throw UsageError("kd index nearest: dimension mismatch");
    if (empty()) throw QueryError("nearest on an empty index");
    const double slack = (1.0 + epsilon_) * (1.0 + epsilon_);
    double best_sq = std::numeric_limits<double>::infinity();
    VertexId best_id = std::numeric_limits<VertexId>::max();
    std::uint64_t visited = 0;

    std::vector<std::pair<std::uint32_t, double>> stack;
    stack.emplace_back(root_, 0.0);
    while (!stack.empty()) {
      const auto [node, bound] = stack.back();
      stack.pop_back();
      if (prune_nearest(bound, slack, best_sq)) continue;
      ++visited;
      const double sq = squared_distance(q, point(node));
      if (sq < best_sq || (sq == best_sq && ids_[node] < best_id)) {
        best_sq = sq;
        best_id = ids_[node];
      }
      const std::uint32_t l = left_[node];
      const std::uint32_t r = right_[node];
      const double dl = l == kNil ? 0.0 : box_min_sq(l, q);
      const double dr = r == kNil ? 0.0 : box_min_sq(r, q);
      // Push the farther child first so the nearer one is expanded next.
      if (l != kNil && r != kNil && dl < dr) {
        stack.emplace_back(r, dr);
        stack.emplace_back(l, dl);
      } else {
        if (l != kNil) stack.emplace_back(l, dl);
        if (r != kNil) stack.emplace_back(r, dr);
      }
    }
    if (stats != nullptr) stats->visited_nodes += visited;
    return {best_id, std::sqrt(best_sq)};
  }
  Neighbor nearest(const Point& q, QueryStats* stats = nullptr) const {
    return nearest(q.coords(), stats);
  }

  /// Ids inside the closed ball of radius r around q, ascending. With
  /// epsilon > 0 points out to (1 + epsilon) r may also be reported.
  std::vector<VertexId> near(std::span<const double> q, double r,
                             QueryStats* stats = nullptr) const {
    if (q.size() != dim_) throw UsageError("kd index near: dimension mismatch");
    if (!(r > 0.0)) throw UsageError("kd index near: radius must be positive");
    std::vector<VertexId> out;
    if (empty()) return out;
    const double r_sq = r * r;
    const double loose_sq = (1.0 + epsilon_) * (1.0 + epsilon_) * r_sq;
    std::uint64_t visited = 0;

    std::vector<std::uint32_t> stack{root_};
    while (!stack.empty()) {
      const std::uint32_t node = stack.back();
      stack.pop_back();
      if (box_min_sq(node, q) > r_sq) continue;
      if (box_max_sq(node, q) <= loose_sq) {
        collect_subtree(node, out, visited);
        continue;
      }
      ++visited;
      if (squared_distance(q, point(node)) <= r_sq) out.push_back(ids_[node]);
      if (left_[node] != kNil) stack.push_back(left_[node]);
      if (right_[node] != kNil) stack.push_back(right_[node]);
    }
    if (stats != nullptr) stats->visited_nodes += visited;
    std::sort(out.begin(), out.end());
    return out;
  }
  std::vector<VertexId> near(const Point& q, double r, QueryStats* stats = nullptr) const {
    return near(q.coords(), r, stats);
  }

 private:
  static constexpr std::uint32_t kNil = std::numeric_limits<std::uint32_t>::max();
  static constexpr std::size_t kFirstRebuild = 16;

  std::span<const double> point(std::uint32_t node) const noexcept {
    return {coords_.data() + static_cast<std::size_t>(node) * dim_, dim_};
  }
  double coord(std::uint32_t node, std::size_t axis) const noexcept {
    return coords_[static_cast<std::size_t>(node) * dim_ + axis];
  }

  bool prune_nearest(double bound, double slack, double best_sq) const noexcept {
    if (epsilon_ == 0.0) return bound > best_sq;
    return bound * slack >= best_sq;
  }

  void grow_box(std::uint32_t node, std::span<const double> p) noexcept {
    double* lo = box_lo_.data() + static_cast<std::size_t>(node) * dim_;
    double* hi = box_hi_.data() + static_cast<std::size_t>(node) * dim_;
    for (std::size_t k = 0; k < dim_; ++k) {
      lo[k] = std::min(lo[k], p[k]);
      hi[k] = std::max(hi[k], p[k]);
    }
  }

  double box_min_sq(std::uint32_t node, std::span<const double> q) const noexcept {
    const double* lo = box_lo_.data() + static_cast<std::size_t>(node) * dim_;
    const double* hi = box_hi_.data() + static_cast<std::size_t>(node) * dim_;
    double sum = 0.0;
    for (std::size_t k = 0; k < dim_; ++k) {
      double diff = 0.0;
      if (q[k] < lo[k]) diff = lo[k] - q[k];
      else if (q[k] > hi[k]) diff = q[k] - hi[k];
      sum += diff * diff;
    }
    return sum;
  }

  double box_max_sq(std::uint32_t node, std::span<const double> q) const noexcept {
    const double* lo = box_lo_.data() + static_cast<std::size_t>(node) * dim_;
    const double* hi = box_hi_.data() + static_cast<std::size_t>(node) * dim_;
    double sum = 0.0;
    for (std::size_t k = 0; k < dim_; ++k) {
      const double diff = std::max(q[k] - lo[k], hi[k] - q[k]);
      sum += diff * diff;
    }
    return sum;
  }

  void collect_subtree(std::uint32_t node, std::vector<VertexId>& out,
                       std::uint64_t& visited) const {
    std::vector<std::uint32_t> stack{node};
    while (!stack.empty()) {
      const std::uint32_t n = stack.back();
      stack.pop_back();
      ++visited;
      out.push_back(ids_[n]);
      if (left_[n] != kNil) stack.push_back(left_[n]);
      if (right_[n] != kNil) stack.push_back(right_[n]);
    }
  }

  void rebuild() {
    std::vector<std::uint32_t> order(ids_.size());
    std::iota(order.begin(), order.end(), 0u);
    root_ = build(order.begin(), order.end());
  }

  using Iter = std::vector<std::uint32_t>::iterator;

  std::uint32_t build(Iter first, Iter last) {
    if (first == last) return kNil;
    // Axis of widest spread; the subtree box falls out of the same pass.
    std::vector<double> lo(dim_, std::numeric_limits<double>::infinity());
    std::vector<double> hi(dim_, -std::numeric_limits<double>::infinity());
    for (Iter it = first; it != last; ++it) {
      for (std::size_t k = 0; k < dim_; ++k) {
        lo[k] = std::min(lo[k], coord(*it, k));
        hi[k] = std::max(hi[k], coord(*it, k));
      }
    }
    std::size_t axis = 0;
    for (std::size_t k = 1; k < dim_; ++k) {
      if (hi[k] - lo[k] > hi[axis] - lo[axis]) axis = k;
    }
    Iter mid = first + (last - first) / 2;
    std::nth_element(first, mid, last, [&](std::uint32_t a, std::uint32_t b) {
      const double ca = coord(a, axis);
      const double cb = coord(b, axis);
      return ca < cb || (ca == cb && a < b);
    });
    // Equal keys must all go right of the split so descent stays consistent.
    const double split = coord(*mid, axis);
    Iter pivot = std::partition(first, mid, [&](std::uint32_t n) { return coord(n, axis) < split; });
    std::iter_swap(pivot, mid);
    mid = pivot;

    const std::uint32_t node = *mid;
    axis_[node] = static_cast<std::uint8_t>(axis);
    std::copy(lo.begin(), lo.end(), box_lo_.begin() + static_cast<std::ptrdiff_t>(node * dim_));
    std::copy(hi.begin(), hi.end(), box_hi_.begin() + static_cast<std::ptrdiff_t>(node * dim_));
    left_[node] = build(first, mid);
    right_[node] = build(mid + 1, last);
    return node;
  }

  std::size_t dim_;
  double epsilon_;
  std::vector<double> coords_;
  std::vector<double> box_lo_;
  std::vector<double> box_hi_;
  std::vector<VertexId> ids_;
  std::vector<std::uint32_t> left_;
  std::vector<std::uint32_t> right_;
  std::vector<std::uint8_t> axis_;
  std::unordered_set<VertexId> used_ids_;
  std::uint32_t root_ = kNil;
  std::size_t next_rebuild_ = kFirstRebuild;
};

}  // namespace optrrt
