#include "nsob/incidence.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "nsob/error.hpp"

namespace nsob {

double SparseRow::sum() const {
  double s = 0.0;
  for (double w : weight) s += w;
  return s;
}

double SparseRow::dot(std::span<const double> values) const {
  double s = 0.0;
  for (std::size_t i = 0; i < index.size(); ++i) s += weight[i] * values[index[i]];
  return s;
}

namespace {

double box_tolerance(const GroundGrid& grid) {
  double extent = 0.0;
  const Point lo = grid.lower();
  const Point hi = grid.upper();
  for (std::size_t k = 0; k < lo.size(); ++k)
    extent = std::max({extent, hi[k] - lo[k], std::abs(lo[k]), std::abs(hi[k])});
  return 1e-12 * extent;
}

// Largest u in [0, 1] with a + u (b - a) inside the box.
Point exit_point(const Point& a, const Point& b, const GroundGrid& grid) {
  const Point lo = grid.lower();
  const Point hi = grid.upper();
  double u_max = 1.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = b[k] - a[k];
    if (d > 0.0 && b[k] > hi[k]) u_max = std::min(u_max, (hi[k] - a[k]) / d);
    if (d < 0.0 && b[k] < lo[k]) u_max = std::min(u_max, (lo[k] - a[k]) / d);
  }
  u_max = std::max(u_max, 0.0);
  Point p(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) p[k] = a[k] + u_max * (b[k] - a[k]);
  return p;
}

}  // namespace

std::vector<ClippedPiece> clip_segment(const Point& a, const Point& b, const GroundGrid& grid) {
  const double tol = box_tolerance(grid);
  std::vector<double> cuts{0.0, 1.0};
  for (std::size_t k = 0; k < grid.dimension(); ++k) {
    const double d = b[k] - a[k];
    if (d == 0.0) continue;
    const auto& e = grid.edges(k);
    const double lo = std::min(a[k], b[k]);
    const double hi = std::max(a[k], b[k]);
    auto first = std::upper_bound(e.begin(), e.end(), lo);
    for (auto it = first; it != e.end() && *it < hi; ++it) cuts.push_back((*it - a[k]) / d);
  }
  std::sort(cuts.begin(), cuts.end());
  std::vector<ClippedPiece> pieces;
  Point mid(a.size());
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double u0 = std::clamp(cuts[i], 0.0, 1.0);
    const double u1 = std::clamp(cuts[i + 1], 0.0, 1.0);
    if (!(u1 - u0 > 1e-15)) continue;
    const double um = 0.5 * (u0 + u1);
    for (std::size_t k = 0; k < a.size(); ++k) mid[k] = a[k] + um * (b[k] - a[k]);
    auto cell = grid.locate(mid, tol);
    if (!cell)
      fail(ErrorKind::out_of_domain,
           fmt::format("segment leaves the grid near ({})", fmt::join(exit_point(a, b, grid), ", ")));
    if (!pieces.empty() && pieces.back().cell == *cell && pieces.back().u1 == u0) {
      pieces.back().u1 = u1;
    } else {
      pieces.push_back({u0, u1, *cell});
    }
  }
  return pieces;
}

SparseRow incidence(const Polyline& path, const GroundGrid& grid, const PathMeasure& measure) {
  if (path.dimension() != grid.dimension())
    fail(ErrorKind::dimension_mismatch, "incidence: path and grid dimensions differ");
  const double tol = box_tolerance(grid);
  for (std::size_t i = 0; i < path.vertices().size(); ++i) {
    if (!grid.contains(path.vertices()[i], tol)) {
      const Point exit = i == 0 ? path.vertices()[0]
                                : exit_point(path.vertices()[i - 1], path.vertices()[i], grid);
      fail(ErrorKind::out_of_domain,
           fmt::format("path exits the grid at ({})", fmt::join(exit, ", ")));
    }
  }
  std::map<std::size_t, double> acc;
  for (std::size_t s = 0; s < path.segment_count(); ++s) {
    const auto& a = path.vertices()[s];
    const auto& b = path.vertices()[s + 1];
    const double len = path.segment_length(s);
    for (const auto& piece : clip_segment(a, b, grid)) {
      const double w = segment_integral(path, s, piece.u0 * len, piece.u1 * len, measure);
      acc[piece.cell] += w;
    }
  }
  SparseRow row;
  row.index.reserve(acc.size());
  row.weight.reserve(acc.size());
  for (const auto& [cell, w] : acc) {
    if (w > 0.0) {
      row.index.push_back(cell);
      row.weight.push_back(w);
    }
  }
  return row;
}

}  // namespace nsob
