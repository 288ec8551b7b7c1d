#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace optrrt {

/// Absolute tolerance shared by every geometric comparison in the library.
inline constexpr double kGeomTolerance = 1e-12;

/// Raised when a caller violates a documented precondition (dimension
/// mismatch, duplicate id, mismatched endpoints, ...).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A state in R^d. Immutable once built.
class Point {
 public:
  Point() = default;
  Point(std::initializer_list<double> coords) : coords_(coords) { validate(); }
  explicit Point(std::vector<double> coords) : coords_(std::move(coords)) { validate(); }
  explicit Point(std::span<const double> coords) : coords_(coords.begin(), coords.end()) {
    validate();
  }

  std::size_t dimension() const noexcept { return coords_.size(); }
  double operator[](std::size_t axis) const noexcept { return coords_[axis]; }
  std::span<const double> coords() const noexcept { return coords_; }

  friend bool operator==(const Point&, const Point&) = default;

 private:
  void validate() const {
    for (double c : coords_) {
      if (!std::isfinite(c)) throw UsageError("point coordinates must be finite");
    }
  }

  std::vector<double> coords_;
};

inline void require_same_dimension(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw UsageError("dimension mismatch: " + std::to_string(a.size()) + " vs " +
                     std::to_string(b.size()));
  }
}

inline double squared_distance(std::span<const double> a, std::span<const double> b) noexcept {
  double sum = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double diff = a[k] - b[k];
    sum += diff * diff;
  }
  return sum;
}

inline double distance(std::span<const double> a, std::span<const double> b) noexcept {
  return std::sqrt(squared_distance(a, b));
}

inline double distance(const Point& a, const Point& b) {
  require_same_dimension(a.coords(), b.coords());
  return distance(a.coords(), b.coords());
}

/// Max-norm closeness under kGeomTolerance.
inline bool approx_equal(const Point& a, const Point& b) {
  if (a.dimension() != b.dimension()) return false;
  for (std::size_t k = 0; k < a.dimension(); ++k) {
    if (std::abs(a[k] - b[k]) > kGeomTolerance) return false;
  }
  return true;
}

struct Segment {
  Point a;
  Point b;

  double length() const { return distance(a, b); }
};

/// Piecewise-linear path through an ordered list of waypoints.
class Polyline {
 public:
  explicit Polyline(std::vector<Point> waypoints) : waypoints_(std::move(waypoints)) {
    if (waypoints_.empty()) throw UsageError("polyline needs at least one waypoint");
    for (const Point& p : waypoints_) {
      require_same_dimension(waypoints_.front().coords(), p.coords());
    }
  }

  const std::vector<Point>& waypoints() const noexcept { return waypoints_; }
  const Point& front() const noexcept { return waypoints_.front(); }
  const Point& back() const noexcept { return waypoints_.back(); }
  std::size_t segment_count() const noexcept { return waypoints_.size() - 1; }
  bool degenerate() const noexcept { return waypoints_.size() == 1; }

 private:
  std::vector<Point> waypoints_;
};

/// The point within distance `eta` of `from` that is closest to `toward`.
inline Point steer(const Point& from, const Point& toward, double eta) {
  if (!(eta > 0.0)) throw UsageError("steer: eta must be positive");
  require_same_dimension(from.coords(), toward.coords());
  const double dist = distance(from.coords(), toward.coords());
  if (dist <= eta) return toward;
  const double scale = eta / dist;
  std::vector<double> out(from.dimension());
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = from[k] + (toward[k] - from[k]) * scale;
  }
  return Point(std::move(out));
}

/// Straight path from a to b; collapses to a single waypoint when a == b.
inline Polyline line(const Point& a, const Point& b) {
  require_same_dimension(a.coords(), b.coords());
  if (a == b) return Polyline({a});
  return Polyline({a, b});
}

inline Polyline concat(const Polyline& first, const Polyline& second) {
  if (!approx_equal(first.back(), second.front())) {
    throw UsageError("concat: end of first path does not match start of second");
  }
  std::vector<Point> joined = first.waypoints();
  joined.insert(joined.end(), second.waypoints().begin() + 1, second.waypoints().end());
  return Polyline(std::move(joined));
}

inline double path_length(const Polyline& path) {
  double total = 0.0;
  const auto& w = path.waypoints();
  for (std::size_t i = 1; i < w.size(); ++i) total += distance(w[i - 1].coords(), w[i].coords());
  return total;
}

}  // namespace optrrt
