#include "nsob/families.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <fmt/format.h>

#include "nsob/error.hpp"

namespace nsob {

namespace {

void check_planar_region(const Box& region) {
  if (region.lower.size() != 2 || region.upper.size() != 2)
    fail(ErrorKind::invalid_input, "slope families live in the plane");
  for (std::size_t k = 0; k < 2; ++k)
    if (!(region.upper[k] > region.lower[k]))
      fail(ErrorKind::invalid_input, "region too thin to fit any slope-k polygonal path");
}

}  // namespace

Polyline connect_with_slope(const Point& from, const Point& to, double k, const Box& region) {
  check_planar_region(region);
  if (!(k > 0.0) || !std::isfinite(k)) fail(ErrorKind::invalid_input, "slope k must be positive");
  Point a = from;
  Point b = to;
  if (b[0] < a[0]) std::swap(a, b);
  const double D = b[0] - a[0];
  const double dy = b[1] - a[1];
  if (!(std::abs(dy) < k * D))
    fail(ErrorKind::invalid_input,
         fmt::format("endpoints need |dy| < k |dx| (dy = {}, k dx = {})", dy, k * D));
  for (const auto* p : {&a, &b})
    for (std::size_t i = 0; i < 2; ++i)
      if ((*p)[i] < region.lower[i] || (*p)[i] > region.upper[i])
        fail(ErrorKind::invalid_input, "endpoint outside the region");

  const double ylo = region.lower[1];
  const double yhi = region.upper[1];
  // m teeth, each a tent (up then down) or a V (down then up)
  for (std::size_t m = 1; m <= 4096; m *= 2) {
    const double w = D / static_cast<double>(m);
    const double rise = dy / static_cast<double>(m);
    const double up = 0.5 * (w + rise / k);    // tent: horizontal extent going up
    const double down = 0.5 * (w - rise / k);  // V: horizontal extent going down
    bool tent_fits = true;
    bool vee_fits = true;
    for (std::size_t j = 0; j < m; ++j) {
      const double y0 = a[1] + rise * static_cast<double>(j);
      if (y0 + k * up > yhi) tent_fits = false;
      if (y0 - k * down < ylo) vee_fits = false;
    }
    if (!tent_fits && !vee_fits) continue;
    const bool tent = tent_fits;
    std::vector<Point> verts{a};
    for (std::size_t j = 0; j < m; ++j) {
      const double x0 = a[0] + w * static_cast<double>(j);
      const double y0 = a[1] + rise * static_cast<double>(j);
      if (tent) verts.push_back({x0 + up, y0 + k * up});
      else verts.push_back({x0 + down, y0 - k * down});
      verts.push_back(j + 1 == m ? b : Point{x0 + w, y0 + rise});
    }
    return Polyline(std::move(verts));
  }
  fail(ErrorKind::invalid_input, "region too thin to fit any slope-k polygonal path");
}

std::vector<Polyline> generate_slope_family(double k, const Box& region, std::size_t count,
                                            std::uint64_t seed) {
  check_planar_region(region);
  if (!(k > 0.0) || !std::isfinite(k)) fail(ErrorKind::invalid_input, "slope k must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double width = region.upper[0] - region.lower[0];
  const double height = region.upper[1] - region.lower[1];
  std::vector<Polyline> out;
  out.reserve(count);
  while (out.size() < count) {
    double x0 = region.lower[0] + width * unit(rng);
    double x1 = region.lower[0] + width * unit(rng);
    if (x1 < x0) std::swap(x0, x1);
    const double D = x1 - x0;
    if (D < 0.1 * width) continue;
    const double y0 = region.lower[1] + height * unit(rng);
    const double reach = 0.9 * k * D;
    const double lo = std::max(region.lower[1], y0 - reach);
    const double hi = std::min(region.upper[1], y0 + reach);
    const double y1 = lo + (hi - lo) * unit(rng);
    out.push_back(connect_with_slope({x0, y0}, {x1, y1}, k, region));
  }
  return out;
}

std::vector<Polyline> axis_path_family(const GroundGrid& grid) {
  std::vector<Polyline> out;
  for (std::size_t i = 0; i < grid.size(); ++i)
    for (std::size_t j : grid.forward_neighbours(i))
      out.emplace_back(std::vector<Point>{grid.cell(i).center, grid.cell(j).center});
  return out;
}

}  // namespace nsob
