#pragma once

#include <memory>
#include <span>
#include <vector>

#include "nsob/field.hpp"
#include "nsob/polyline.hpp"
#include "nsob/quadrature.hpp"

namespace nsob {

enum class PathMeasureKind { arc_length, weighted, parabolic_height, density };

/// Rule assigning mu-mass along a path. Every kind is absolutely continuous
/// with respect to Euclidean arc length, with density
///   arc_length        1
///   weighted          omega(x)
///   parabolic_height  |last component of the unit tangent|  (mass = |dy|)
///   density           tabulated rho_mu(s), s = arc position along the curve
/// times a global scale factor.
class PathMeasure {
 public:
  static PathMeasure arc_length();
  static PathMeasure weighted(FieldFn omega);
  static PathMeasure parabolic_height();
  /// Piecewise-linear density in arc position, held constant past the ends.
  static PathMeasure density(std::vector<double> arc_positions, std::vector<double> values);

  PathMeasure scaled(double factor) const;

  PathMeasureKind kind() const noexcept { return kind_; }
  double scale() const noexcept { return scale_; }

  /// True when the density is constant along every straight segment.
  bool constant_on_segments() const noexcept {
    return kind_ == PathMeasureKind::arc_length || kind_ == PathMeasureKind::parabolic_height;
  }

  /// Density of mu w.r.t. arc length at x on a segment with unit tangent
  /// `direction` and arc position `arc`.
  double density_at(std::span<const double> x, std::span<const double> direction, double arc) const;

  const FieldFn& omega() const { return *omega_; }

 private:
  PathMeasureKind kind_ = PathMeasureKind::arc_length;
  double scale_ = 1.0;
  std::shared_ptr<const FieldFn> omega_;
  std::shared_ptr<const std::vector<double>> table_s_;
  std::shared_ptr<const std::vector<double>> table_v_;
};

/// Integral of g (or of 1 when g is null) against mu over the piece of
/// segment `seg` between local arc positions a <= b.
double segment_integral(const Polyline& path, std::size_t seg, double a, double b,
                        const PathMeasure& measure, const ScalarField* g = nullptr,
                        const MidpointOptions& options = {});

/// mu(Im path).
double mu_length(const Polyline& path, const PathMeasure& measure);

/// nu(t) = mu-mass of the path restricted to [0, t].
double nu_at(const Polyline& path, const PathMeasure& measure, double t);

/// Integral of g >= 0 over the path against mu. Grid-backed fields are
/// integrated exactly via incidence.
double path_integral(const ScalarField& g, const Polyline& path, const PathMeasure& measure);

}  // namespace nsob
