#pragma once

#include <cstddef>
#include <vector>

#include "nsob/metric.hpp"

namespace nsob {

/// Injective piecewise-linear path. The parameter t in [0, 1] is
/// proportional to Euclidean arc length. Construction validates that
/// consecutive vertices differ and that no two segments meet except
/// neighbours at their shared vertex.
class Polyline {
 public:
  /// `arc_offset` is the Euclidean arc position of vertex 0 along a parent
  /// curve; only tabulated path densities read it. subpath() sets it.
  explicit Polyline(std::vector<Point> vertices, double arc_offset = 0.0);

  const std::vector<Point>& vertices() const noexcept { return vertices_; }
  std::size_t dimension() const noexcept { return vertices_.front().size(); }
  std::size_t segment_count() const noexcept { return vertices_.size() - 1; }
  double length() const noexcept { return cumulative_.back(); }
  double segment_length(std::size_t i) const { return cumulative_[i + 1] - cumulative_[i]; }
  /// Arc length from vertex 0 to vertex i.
  double arc_to_vertex(std::size_t i) const { return cumulative_[i]; }
  double arc_offset() const noexcept { return arc_offset_; }

  const Point& front() const { return vertices_.front(); }
  const Point& back() const { return vertices_.back(); }

  /// Segment containing parameter t (the left one at interior vertices).
  std::size_t segment_at(double t) const;
  Point at(double t) const;

 private:
  std::vector<Point> vertices_;
  std::vector<double> cumulative_;
  double arc_offset_ = 0.0;
};

/// Restriction to [s, t] with interpolated endpoints; 0 <= s < t <= 1.
Polyline subpath(const Polyline& path, double s, double t);

/// The eight consecutive pieces [j/8, (j+1)/8] of the parameter domain.
std::vector<Polyline> dyadic_subpaths(const Polyline& path);

/// Closest distance between segments [p0, p1] and [q0, q1] in R^n.
double segment_distance(const Point& p0, const Point& p1, const Point& q0, const Point& q1);

}  // namespace nsob
