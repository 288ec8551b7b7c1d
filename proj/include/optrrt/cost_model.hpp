#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "optrrt/geometry.hpp"
#include "optrrt/world.hpp"

namespace optrrt {

enum class CostKind { euclidean_length, line_integral };

inline const char* to_string(CostKind kind) noexcept {
  return kind == CostKind::euclidean_length ? "euclidean_length" : "line_integral";
}

/// Box with a constant cost density.
struct WeightedRegion {
  Box box;
  double weight = 1.0;
};

/// Path cost c(sigma): Euclidean length, or the line integral of a
/// piecewise-constant density that equals `weight` on each region's closed
/// box and `default_weight` elsewhere.
class CostModel {
 public:
  CostModel() = default;

  static CostModel euclidean() { return CostModel(); }

  static CostModel line_integral(std::vector<WeightedRegion> regions, double default_weight) {
    CostModel m;
    m.kind_ = CostKind::line_integral;
    m.regions_ = std::move(regions);
    m.default_weight_ = default_weight;
    m.validate();
    return m;
  }

  CostKind kind() const noexcept { return kind_; }
  const std::vector<WeightedRegion>& regions() const noexcept { return regions_; }
  double default_weight() const noexcept { return default_weight_; }

  double max_weight() const noexcept {
    double w = default_weight_;
    for (const auto& r : regions_) w = std::max(w, r.weight);
    return w;
  }

  /// Cost of the straight segment [a, b]. Endpoints are ordered
  /// lexicographically first, so the value is bitwise symmetric.
  double segment_cost(std::span<const double> a, std::span<const double> b) const noexcept {
    if (std::lexicographical_compare(b.begin(), b.end(), a.begin(), a.end())) std::swap(a, b);
    const double length = distance(a, b);
    if (kind_ == CostKind::euclidean_length) return length;
    // Regions are interior-disjoint, so their clipped pieces can be summed
    // independently; shared faces have measure zero.
    double cost = default_weight_ * length;
    for (const WeightedRegion& region : regions_) {
      double t0 = 0.0;
      double t1 = 0.0;
      if (clip_segment_closed(region.box, a, b, t0, t1) && t1 > t0) {
        cost += (region.weight - default_weight_) * length * (t1 - t0);
      }
    }
    return cost;
  }
  double segment_cost(const Point& a, const Point& b) const {
    require_same_dimension(a.coords(), b.coords());
    return segment_cost(a.coords(), b.coords());
  }

  /// Sum of segment costs. A single-waypoint path costs 0; real paths of
  /// nonzero length always cost strictly more.
  double path_cost(const Polyline& path) const {
    double total = 0.0;
    const auto& w = path.waypoints();
    for (std::size_t i = 1; i < w.size(); ++i) total += segment_cost(w[i - 1].coords(), w[i].coords());
    return total;
  }

 private:
  void validate() const {
    if (!(default_weight_ > 0.0) || !std::isfinite(default_weight_)) {
      throw UsageError("cost model: default weight must be positive");
    }
    for (std::size_t i = 0; i < regions_.size(); ++i) {
      const auto& r = regions_[i];
      if (!(r.weight > 0.0) || !std::isfinite(r.weight)) {
        throw UsageError("cost model: region weights must be positive");
      }
      r.box.validate(regions_.front().box.dimension(), "cost region");
      for (std::size_t j = 0; j < i; ++j) {
        if (regions_[j].box.interiors_overlap(r.box)) {
          throw UsageError("cost model: regions may not overlap");
        }
      }
    }
  }

  CostKind kind_ = CostKind::euclidean_length;
  std::vector<WeightedRegion> regions_;
  double default_weight_ = 1.0;
};

}  // namespace optrrt
