#include "nsob/parametrize.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "nsob/error.hpp"

namespace nsob {

ParametrizedPath::ParametrizedPath(Polyline base, PathMeasure measure, std::size_t nodes_per_segment)
    : base_(std::move(base)), measure_(std::move(measure)) {
  const std::size_t K = std::max<std::size_t>(1, nodes_per_segment);
  const double L = base_.length();
  t_.push_back(0.0);
  nu_.push_back(0.0);
  vertex_node_.push_back(0);
  for (std::size_t seg = 0; seg < base_.segment_count(); ++seg) {
    const double len = base_.segment_length(seg);
    const double start = base_.arc_to_vertex(seg);
    for (std::size_t j = 0; j < K; ++j) {
      const double a = len * static_cast<double>(j) / static_cast<double>(K);
      const double b = (j + 1 == K) ? len : len * static_cast<double>(j + 1) / static_cast<double>(K);
      const double mass = segment_integral(base_, seg, a, b, measure_);
      if (!(mass > 0.0))
        fail(ErrorKind::gamma_mu_violation,
             fmt::format("sub-path of segment {} at arc [{}, {}] has zero mu-mass", seg, start + a,
                         start + b));
      segment_of_node_.push_back(seg);
      t_.push_back((seg + 1 == base_.segment_count() && j + 1 == K) ? 1.0 : (start + b) / L);
      nu_.push_back(nu_.back() + mass);
    }
    vertex_node_.push_back(t_.size() - 1);
  }
  if (!std::isfinite(h())) fail(ErrorKind::gamma_mu_violation, "path has infinite mu-mass");
}

double ParametrizedPath::local_mass(std::size_t node, double t) const {
  const std::size_t seg = segment_of_node_[node];
  const double L = base_.length();
  const double start = base_.arc_to_vertex(seg);
  const double a = t_[node] * L - start;
  const double b = t * L - start;
  if (b <= a) return 0.0;
  MidpointOptions opts;
  opts.min_intervals = 4;
  return segment_integral(base_, seg, a, b, measure_, nullptr, opts);
}

double ParametrizedPath::nu(double t) const {
  if (!(t >= 0.0 && t <= 1.0)) fail(ErrorKind::invalid_input, fmt::format("nu: t = {} outside [0, 1]", t));
  if (t == 0.0) return 0.0;
  if (t == 1.0) return h();
  auto it = std::upper_bound(t_.begin(), t_.end(), t);
  const std::size_t node = static_cast<std::size_t>(it - t_.begin()) - 1;
  if (t == t_[node]) return nu_[node];
  return nu_[node] + local_mass(node, t);
}

double ParametrizedPath::parameter_at(double s) const {
  if (!(s >= 0.0 && s <= h() * (1.0 + 1e-15)))
    fail(ErrorKind::invalid_input, fmt::format("parameter_at: s = {} outside [0, {}]", s, h()));
  if (s <= 0.0) return 0.0;
  if (s >= h()) return 1.0;
  auto it = std::upper_bound(nu_.begin(), nu_.end(), s);
  const std::size_t node = static_cast<std::size_t>(it - nu_.begin()) - 1;
  const double target = s - nu_[node];
  if (target <= 0.0) return t_[node];
  double lo = t_[node];
  double hi = t_[node + 1];
  const double piece_mass = nu_[node + 1] - nu_[node];
  if (measure_.constant_on_segments()) {
    return lo + (hi - lo) * std::clamp(target / piece_mass, 0.0, 1.0);
  }

  // safeguarded Newton on t -> local_mass(node, t) - target
  const std::size_t seg = segment_of_node_[node];
  const auto& va = base_.vertices()[seg];
  const auto& vb = base_.vertices()[seg + 1];
  const double seg_len = base_.segment_length(seg);
  Point dir(va.size()), x(va.size());
  for (std::size_t k = 0; k < dir.size(); ++k) dir[k] = (vb[k] - va[k]) / seg_len;
  const double L = base_.length();
  const double arc0 = base_.arc_offset() + base_.arc_to_vertex(seg);

  double t = lo + (hi - lo) * (target / piece_mass);
  for (int it_count = 0; it_count < 100; ++it_count) {
    const double f = local_mass(node, t) - target;
    if (f > 0.0) hi = t; else lo = t;
    if (std::abs(f) <= 1e-11 * piece_mass || hi - lo <= 1e-13) break;
    const double local = t * L - base_.arc_to_vertex(seg);
    for (std::size_t k = 0; k < x.size(); ++k) x[k] = va[k] + local * dir[k];
    const double deriv = measure_.density_at(x, dir, arc0 + local) * L;
    double next = deriv > 0.0 ? t - f / deriv : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    t = next;
  }
  return t;
}

Point ParametrizedPath::at(double s) const { return base_.at(parameter_at(s)); }

double ParametrizedPath::integrate(const ScalarField& g, double s0, double s1) const {
  s0 = std::clamp(s0, 0.0, h());
  s1 = std::clamp(s1, 0.0, h());
  if (s1 <= s0) return 0.0;
  auto integrand = [&](double s) { return g(at(s)); };
  // integrate vertex-to-vertex so the kinks of gamma_h sit on panel edges
  double total = 0.0;
  for (std::size_t v = 0; v + 1 < vertex_node_.size(); ++v) {
    const double a = std::max(s0, nu_[vertex_node_[v]]);
    const double b = std::min(s1, nu_[vertex_node_[v + 1]]);
    if (b > a) total += integrate_midpoint(integrand, a, b);
  }
  return total;
}

ParametrizedPath parametrize(const Polyline& path, const PathMeasure& measure) {
  return ParametrizedPath(path, measure);
}

void validate_gamma_mu(const Polyline& path, const PathMeasure& measure) {
  ParametrizedPath(path, measure, 16);
}

}  // namespace nsob
