#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "nsob/grid.hpp"
#include "nsob/polyline.hpp"

namespace nsob {

struct Box {
  Point lower;
  Point upper;
};

/// Polygonal path from `from` to `to` in the plane made of segments of slope
/// exactly +k or -k, staying inside `region`. Uses a single tent (or V) when
/// it fits and a sawtooth of smaller teeth otherwise. Needs
/// |dy| < k |dx|.
Polyline connect_with_slope(const Point& from, const Point& to, double k, const Box& region);

/// `count` random slope-(+-k) polygonal paths joining random endpoint pairs
/// in a planar region. Every segment has nonzero height, so each path is
/// valid under the parabolic height measure.
std::vector<Polyline> generate_slope_family(double k, const Box& region, std::size_t count,
                                            std::uint64_t seed);

/// Segments joining each cell center to its +1 neighbour along every axis.
std::vector<Polyline> axis_path_family(const GroundGrid& grid);

}  // namespace nsob
