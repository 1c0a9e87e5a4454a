#include "nsob/path_measure.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "nsob/error.hpp"
#include "nsob/incidence.hpp"

namespace nsob {

PathMeasure PathMeasure::arc_length() { return PathMeasure{}; }

PathMeasure PathMeasure::weighted(FieldFn omega) {
  if (!omega) fail(ErrorKind::invalid_input, "weighted path measure needs a weight");
  PathMeasure m;
  m.kind_ = PathMeasureKind::weighted;
  m.omega_ = std::make_shared<const FieldFn>(std::move(omega));
  return m;
}

PathMeasure PathMeasure::parabolic_height() {
  PathMeasure m;
  m.kind_ = PathMeasureKind::parabolic_height;
  return m;
}

PathMeasure PathMeasure::density(std::vector<double> arc_positions, std::vector<double> values) {
  if (arc_positions.empty() || arc_positions.size() != values.size())
    fail(ErrorKind::invalid_input, "density table needs matching, non-empty columns");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i]) || values[i] < 0.0 || !std::isfinite(arc_positions[i]))
      fail(ErrorKind::invalid_input, fmt::format("density table row {} invalid", i));
    if (i > 0 && !(arc_positions[i] > arc_positions[i - 1]))
      fail(ErrorKind::invalid_input, "density table arc positions must increase");
  }
  PathMeasure m;
  m.kind_ = PathMeasureKind::density;
  m.table_s_ = std::make_shared<const std::vector<double>>(std::move(arc_positions));
  m.table_v_ = std::make_shared<const std::vector<double>>(std::move(values));
  return m;
}

PathMeasure PathMeasure::scaled(double factor) const {
  if (!(factor > 0.0) || !std::isfinite(factor))
    fail(ErrorKind::invalid_input, "path measure scale must be positive");
  PathMeasure m = *this;
  m.scale_ *= factor;
  return m;
}

double PathMeasure::density_at(std::span<const double> x, std::span<const double> direction,
                               double arc) const {
  double d = 1.0;
  switch (kind_) {
    case PathMeasureKind::arc_length:
      break;
    case PathMeasureKind::weighted:
      d = (*omega_)(x);
      break;
    case PathMeasureKind::parabolic_height:
      d = std::abs(direction.back());
      break;
    case PathMeasureKind::density: {
      const auto& s = *table_s_;
      const auto& v = *table_v_;
      if (arc <= s.front()) {
        d = v.front();
      } else if (arc >= s.back()) {
        d = v.back();
      } else {
        auto it = std::upper_bound(s.begin(), s.end(), arc);
        std::size_t i = static_cast<std::size_t>(it - s.begin()) - 1;
        double u = (arc - s[i]) / (s[i + 1] - s[i]);
        d = v[i] + u * (v[i + 1] - v[i]);
      }
      break;
    }
  }
  if (!std::isfinite(d) || d < 0.0)
    fail(ErrorKind::evaluation, fmt::format("path measure density {} invalid", d));
  return scale_ * d;
}

namespace {

struct SegmentFrame {
  Point origin;
  Point direction;  // unit tangent
  double length;
  double arc_start;  // absolute arc position of the segment start
};

SegmentFrame frame_of(const Polyline& path, std::size_t seg) {
  SegmentFrame f;
  const auto& a = path.vertices()[seg];
  const auto& b = path.vertices()[seg + 1];
  f.origin = a;
  f.length = path.segment_length(seg);
  f.direction.resize(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) f.direction[k] = (b[k] - a[k]) / f.length;
  f.arc_start = path.arc_offset() + path.arc_to_vertex(seg);
  return f;
}

double piece_integral(const SegmentFrame& f, double a, double b, const PathMeasure& measure,
                      const ScalarField* g, const MidpointOptions& options) {
  if (b <= a) return 0.0;
  const bool constant_g = g == nullptr || g->constant_value().has_value();
  const double gc = g == nullptr ? 1.0 : g->constant_value().value_or(1.0);
  if (measure.constant_on_segments() && constant_g) {
    return gc * (b - a) * measure.density_at(f.origin, f.direction, f.arc_start);
  }
  Point x(f.origin.size());
  auto integrand = [&](double s) {
    for (std::size_t k = 0; k < x.size(); ++k) x[k] = f.origin[k] + s * f.direction[k];
    double v = measure.density_at(x, f.direction, f.arc_start + s);
    if (!constant_g) {
      double gv = (*g)(x);
      if (!std::isfinite(gv)) fail(ErrorKind::evaluation, "integrand field not finite on the path");
      v *= gv;
    } else {
      v *= gc;
    }
    return v;
  };
  return integrate_midpoint(integrand, a, b, options);
}

}  // namespace

double segment_integral(const Polyline& path, std::size_t seg, double a, double b,
                        const PathMeasure& measure, const ScalarField* g,
                        const MidpointOptions& options) {
  const SegmentFrame f = frame_of(path, seg);
  a = std::clamp(a, 0.0, f.length);
  b = std::clamp(b, 0.0, f.length);
  if (b <= a) return 0.0;
  if (g != nullptr && g->grid_function() != nullptr) {
    // piecewise constant: split along the field's own grid
    const GridFunction& gf = *g->grid_function();
    Point pa(f.origin.size()), pb(f.origin.size());
    for (std::size_t k = 0; k < pa.size(); ++k) {
      pa[k] = f.origin[k] + a * f.direction[k];
      pb[k] = f.origin[k] + b * f.direction[k];
    }
    double total = 0.0;
    for (const auto& piece : clip_segment(pa, pb, gf.grid())) {
      const double s0 = a + piece.u0 * (b - a);
      const double s1 = a + piece.u1 * (b - a);
      total += gf[piece.cell] * piece_integral(f, s0, s1, measure, nullptr, options);
    }
    return total;
  }
  return piece_integral(f, a, b, measure, g, options);
}

double mu_length(const Polyline& path, const PathMeasure& measure) {
  double total = 0.0;
  for (std::size_t i = 0; i < path.segment_count(); ++i)
    total += segment_integral(path, i, 0.0, path.segment_length(i), measure);
  return total;
}

double nu_at(const Polyline& path, const PathMeasure& measure, double t) {
  if (!(t >= 0.0 && t <= 1.0)) fail(ErrorKind::invalid_input, fmt::format("nu_at: t = {} outside [0, 1]", t));
  if (t == 0.0) return 0.0;
  const double s = t * path.length();
  double total = 0.0;
  for (std::size_t i = 0; i < path.segment_count(); ++i) {
    const double start = path.arc_to_vertex(i);
    if (start >= s) break;
    const double end = std::min(s, path.arc_to_vertex(i + 1));
    total += segment_integral(path, i, 0.0, end - start, measure);
  }
  return total;
}

double path_integral(const ScalarField& g, const Polyline& path, const PathMeasure& measure) {
  if (const GridFunction* gf = g.grid_function()) {
    return incidence(path, gf->grid(), measure).dot(gf->values());
  }
  double total = 0.0;
  for (std::size_t i = 0; i < path.segment_count(); ++i)
    total += segment_integral(path, i, 0.0, path.segment_length(i), measure, &g);
  return total;
}

}  // namespace nsob
