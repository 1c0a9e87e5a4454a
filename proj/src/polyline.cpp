#include "nsob/polyline.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "nsob/error.hpp"

namespace nsob {

namespace {

double dot(const Point& a, const Point& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

Point sub(const Point& a, const Point& b) {
  Point r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

double norm(const Point& a) { return std::sqrt(dot(a, a)); }

}  // namespace

double segment_distance(const Point& p0, const Point& p1, const Point& q0, const Point& q1) {
  // closest points of two segments, clamped parametric form
  const Point d1 = sub(p1, p0);
  const Point d2 = sub(q1, q0);
  const Point r = sub(p0, q0);
  const double a = dot(d1, d1);
  const double e = dot(d2, d2);
  const double f = dot(d2, r);
  double s = 0.0;
  double t = 0.0;
  if (a <= 0.0 && e <= 0.0) return norm(r);
  if (a <= 0.0) {
    t = std::clamp(f / e, 0.0, 1.0);
  } else {
    const double c = dot(d1, r);
    if (e <= 0.0) {
      s = std::clamp(-c / a, 0.0, 1.0);
    } else {
      const double b = dot(d1, d2);
      const double denom = a * e - b * b;
      s = denom > 0.0 ? std::clamp((b * f - c * e) / denom, 0.0, 1.0) : 0.0;
      t = (b * s + f) / e;
      if (t < 0.0) {
        t = 0.0;
        s = std::clamp(-c / a, 0.0, 1.0);
      } else if (t > 1.0) {
        t = 1.0;
        s = std::clamp((b - c) / a, 0.0, 1.0);
      }
    }
  }
  Point diff(p0.size());
  for (std::size_t i = 0; i < diff.size(); ++i)
    diff[i] = (p0[i] + s * d1[i]) - (q0[i] + t * d2[i]);
  return norm(diff);
}

Polyline::Polyline(std::vector<Point> vertices, double arc_offset)
    : vertices_(std::move(vertices)), arc_offset_(arc_offset) {
  if (vertices_.size() < 2) fail(ErrorKind::invalid_input, "polyline needs at least 2 vertices");
  const std::size_t dim = vertices_.front().size();
  if (dim == 0) fail(ErrorKind::invalid_input, "polyline vertices need coordinates");
  for (const auto& v : vertices_) {
    if (v.size() != dim) fail(ErrorKind::dimension_mismatch, "polyline vertices differ in dimension");
    for (double c : v)
      if (!std::isfinite(c)) fail(ErrorKind::invalid_input, "polyline vertex not finite");
  }
  cumulative_.assign(vertices_.size(), 0.0);
  double scale = 0.0;
  for (std::size_t i = 0; i + 1 < vertices_.size(); ++i) {
    const double len = norm(sub(vertices_[i + 1], vertices_[i]));
    if (!(len > 0.0))
      fail(ErrorKind::invalid_input, fmt::format("polyline vertices {} and {} coincide", i, i + 1));
    cumulative_[i + 1] = cumulative_[i] + len;
    for (double c : vertices_[i]) scale = std::max(scale, std::abs(c));
  }
  for (double c : vertices_.back()) scale = std::max(scale, std::abs(c));
  scale = std::max(scale, length());

  const double tol = 1e-12 * scale;
  const std::size_t n = segment_count();
  for (std::size_t i = 0; i < n; ++i) {
    if (i + 1 < n) {
      // neighbours share a vertex; they may not fold back onto each other
      const Point d1 = sub(vertices_[i + 1], vertices_[i]);
      const Point d2 = sub(vertices_[i + 2], vertices_[i + 1]);
      const double c = dot(d1, d2);
      if (c < 0.0 && std::abs(std::abs(c) - norm(d1) * norm(d2)) <= 1e-12 * norm(d1) * norm(d2))
        fail(ErrorKind::invalid_input,
             fmt::format("polyline not injective: segment {} folds back onto {}", i + 1, i));
    }
    for (std::size_t j = i + 2; j < n; ++j) {
      const double d = segment_distance(vertices_[i], vertices_[i + 1], vertices_[j], vertices_[j + 1]);
      if (d <= tol)
        fail(ErrorKind::invalid_input,
             fmt::format("polyline not injective: segments {} and {} intersect", i, j));
    }
  }
}

std::size_t Polyline::segment_at(double t) const {
  const double s = std::clamp(t, 0.0, 1.0) * length();
  auto it = std::lower_bound(cumulative_.begin() + 1, cumulative_.end(), s);
  std::size_t i = static_cast<std::size_t>(it - cumulative_.begin()) - 1;
  return std::min(i, segment_count() - 1);
}

Point Polyline::at(double t) const {
  if (t <= 0.0) return vertices_.front();
  if (t >= 1.0) return vertices_.back();
  const std::size_t i = segment_at(t);
  const double s = t * length();
  const double u = std::clamp((s - cumulative_[i]) / segment_length(i), 0.0, 1.0);
  Point p(dimension());
  for (std::size_t k = 0; k < p.size(); ++k)
    p[k] = vertices_[i][k] + u * (vertices_[i + 1][k] - vertices_[i][k]);
  return p;
}

Polyline subpath(const Polyline& path, double s, double t) {
  if (!(s >= 0.0 && t <= 1.0)) fail(ErrorKind::invalid_input, "subpath parameters outside [0, 1]");
  if (!(s < t)) fail(ErrorKind::invalid_input, fmt::format("subpath needs s < t, got {} >= {}", s, t));
  if (s == 0.0 && t == 1.0) return path;
  const double L = path.length();
  std::vector<Point> verts;
  verts.push_back(path.at(s));
  for (std::size_t i = 1; i + 1 < path.vertices().size(); ++i) {
    const double ti = path.arc_to_vertex(i) / L;
    if (ti > s && ti < t) verts.push_back(path.vertices()[i]);
  }
  verts.push_back(path.at(t));
  // drop near-duplicates created when s or t sits on a vertex
  std::vector<Point> clean;
  for (auto& v : verts) {
    if (!clean.empty()) {
      double d = 0.0;
      for (std::size_t k = 0; k < v.size(); ++k) d = std::max(d, std::abs(v[k] - clean.back()[k]));
      if (d <= 1e-15 * std::max(1.0, L)) continue;
    }
    clean.push_back(std::move(v));
  }
  if (clean.size() < 2) fail(ErrorKind::invalid_input, "subpath is trivial");
  return Polyline(std::move(clean), path.arc_offset() + s * L);
}

std::vector<Polyline> dyadic_subpaths(const Polyline& path) {
  std::vector<Polyline> out;
  out.reserve(8);
  for (int j = 0; j < 8; ++j) out.push_back(subpath(path, j / 8.0, (j + 1) / 8.0));
  return out;
}

}  // namespace nsob
