#pragma once

#include <cstddef>
#include <vector>

#include "nsob/field.hpp"
#include "nsob/path_measure.hpp"
#include "nsob/polyline.hpp"

namespace nsob {

/// A path together with its mu-arc-length parametrization gamma_h on
/// [0, h]. The nu table is built once at construction: nodes_per_segment
/// equal arc-length pieces per segment, each with strictly positive mass.
class ParametrizedPath {
 public:
  /// Throws gamma_mu_violation when h = 0 or some table piece has zero mass.
  ParametrizedPath(Polyline base, PathMeasure measure, std::size_t nodes_per_segment = 64);

  const Polyline& base() const noexcept { return base_; }
  const PathMeasure& measure() const noexcept { return measure_; }
  double h() const noexcept { return nu_.back(); }

  /// nu_gamma(t), t in [0, 1].
  double nu(double t) const;
  /// nu_gamma^{-1}(s), s in [0, h]; parameter tolerance below 1e-10.
  double parameter_at(double s) const;
  /// gamma_h(s).
  Point at(double s) const;

  /// Integral over [s0, s1] of g(gamma_h(s)) ds, by composite midpoint in s.
  double integrate(const ScalarField& g, double s0, double s1) const;
  double integrate(const ScalarField& g) const { return integrate(g, 0.0, h()); }

  const std::vector<double>& table_t() const noexcept { return t_; }
  const std::vector<double>& table_nu() const noexcept { return nu_; }

 private:
  // mass between table node i and parameter t within the same piece
  double local_mass(std::size_t node, double t) const;

  Polyline base_;
  PathMeasure measure_;
  std::vector<double> t_;
  std::vector<double> nu_;
  std::vector<std::size_t> segment_of_node_;
  std::vector<std::size_t> vertex_node_;  // table node index of each vertex
};

ParametrizedPath parametrize(const Polyline& path, const PathMeasure& measure);

/// Check the Gamma^mu membership condition on the sampled pieces.
void validate_gamma_mu(const Polyline& path, const PathMeasure& measure);

}  // namespace nsob
