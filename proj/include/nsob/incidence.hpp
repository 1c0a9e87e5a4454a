#pragma once

#include <cstddef>
#include <vector>

#include "nsob/grid.hpp"
#include "nsob/path_measure.hpp"
#include "nsob/polyline.hpp"

namespace nsob {

/// Sparse row: cell index -> weight, indices strictly increasing.
struct SparseRow {
  std::vector<std::size_t> index;
  std::vector<double> weight;

  double sum() const;
  double dot(std::span<const double> values) const;
  std::size_t size() const noexcept { return index.size(); }
};

/// A piece [u0, u1] of a straight segment (fractions of the segment) lying
/// in one cell.
struct ClippedPiece {
  double u0 = 0.0;
  double u1 = 0.0;
  std::size_t cell = 0;
};

/// Split segment a -> b at every crossing with a grid edge. The segment must
/// lie inside the grid's bounding box.
std::vector<ClippedPiece> clip_segment(const Point& a, const Point& b, const GroundGrid& grid);

/// w_c = mu-mass of the part of the path inside cell c.
/// Throws out_of_domain, naming the exit point, when the path leaves the grid.
SparseRow incidence(const Polyline& path, const GroundGrid& grid, const PathMeasure& measure);

}  // namespace nsob
