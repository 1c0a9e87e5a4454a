#include "nsob/grid.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "nsob/error.hpp"
#include "nsob/quadrature.hpp"

namespace nsob {

GroundGrid::GroundGrid(std::vector<std::vector<double>> edges, MetricDescriptor metric)
    : edges_(std::move(edges)), metric_(std::move(metric)) {
  if (edges_.empty()) fail(ErrorKind::invalid_input, "grid needs at least one axis");
  if (edges_.size() != metric_.dimension())
    fail(ErrorKind::dimension_mismatch,
         fmt::format("grid dimension {} vs metric dimension {}", edges_.size(), metric_.dimension()));
  std::size_t total = 1;
  for (std::size_t k = 0; k < edges_.size(); ++k) {
    const auto& e = edges_[k];
    if (e.size() < 2) fail(ErrorKind::invalid_input, fmt::format("axis {} needs >= 2 edges", k));
    for (std::size_t i = 0; i + 1 < e.size(); ++i) {
      if (!std::isfinite(e[i]) || !std::isfinite(e[i + 1]) || !(e[i + 1] > e[i]))
        fail(ErrorKind::invalid_input, fmt::format("axis {} edges must be finite and increasing", k));
    }
    total *= e.size() - 1;
  }

  const std::size_t dim = edges_.size();
  cells_.resize(total);
  std::vector<std::size_t> idx(dim, 0);
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t r = flat;
    for (std::size_t k = dim; k-- > 0;) {
      idx[k] = r % count(k);
      r /= count(k);
    }
    Cell& c = cells_[flat];
    c.center.resize(dim);
    c.widths.resize(dim);
    double volume = 1.0;
    for (std::size_t k = 0; k < dim; ++k) {
      double lo = edges_[k][idx[k]];
      double hi = edges_[k][idx[k] + 1];
      c.center[k] = 0.5 * (lo + hi);
      c.widths[k] = hi - lo;
      volume *= hi - lo;
    }
    c.measure = volume;
  }
}

GroundGrid GroundGrid::uniform(const Point& lower, const Point& upper,
                               const std::vector<std::size_t>& counts, MetricDescriptor metric) {
  if (lower.size() != upper.size() || lower.size() != counts.size())
    fail(ErrorKind::dimension_mismatch, "uniform grid: lower/upper/counts lengths differ");
  std::vector<std::vector<double>> edges(lower.size());
  for (std::size_t k = 0; k < lower.size(); ++k) {
    if (counts[k] == 0) fail(ErrorKind::invalid_input, "uniform grid: zero cells along an axis");
    if (!(upper[k] > lower[k])) fail(ErrorKind::invalid_input, "uniform grid: empty extent");
    edges[k].resize(counts[k] + 1);
    const double h = (upper[k] - lower[k]) / static_cast<double>(counts[k]);
    for (std::size_t i = 0; i <= counts[k]; ++i)
      edges[k][i] = (i == counts[k]) ? upper[k] : lower[k] + h * static_cast<double>(i);
  }
  return GroundGrid(std::move(edges), std::move(metric));
}

GroundGrid GroundGrid::with_measures(std::vector<double> measures) const {
  if (measures.size() != cells_.size())
    fail(ErrorKind::dimension_mismatch,
         fmt::format("{} measures for {} cells", measures.size(), cells_.size()));
  double total = 0.0;
  for (std::size_t i = 0; i < measures.size(); ++i) {
    if (!std::isfinite(measures[i]) || measures[i] < 0.0)
      fail(ErrorKind::invalid_input, fmt::format("cell {} measure {} invalid", i, measures[i]));
    total += measures[i];
  }
  if (!(total > 0.0)) fail(ErrorKind::invalid_input, "total measure must be positive");
  GroundGrid out = *this;
  for (std::size_t i = 0; i < measures.size(); ++i) out.cells_[i].measure = measures[i];
  return out;
}

GroundGrid GroundGrid::with_weight(const std::function<double(std::span<const double>)>& weight,
                                   double power) const {
  std::vector<double> m(cells_.size());
  auto integrand = [&](std::span<const double> x) { return std::pow(weight(x), power); };
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    const Cell& c = cells_[i];
    Point lo(c.center.size()), hi(c.center.size());
    for (std::size_t k = 0; k < lo.size(); ++k) {
      lo[k] = c.center[k] - 0.5 * c.widths[k];
      hi[k] = c.center[k] + 0.5 * c.widths[k];
    }
    m[i] = integrate_box(integrand, lo, hi);
  }
  return with_measures(std::move(m));
}

std::vector<double> GroundGrid::measures() const {
  std::vector<double> m(cells_.size());
  for (std::size_t i = 0; i < cells_.size(); ++i) m[i] = cells_[i].measure;
  return m;
}

double GroundGrid::total_measure() const {
  double s = 0.0;
  for (const auto& c : cells_) s += c.measure;
  return s;
}

Point GroundGrid::lower() const {
  Point p(dimension());
  for (std::size_t k = 0; k < p.size(); ++k) p[k] = edges_[k].front();
  return p;
}

Point GroundGrid::upper() const {
  Point p(dimension());
  for (std::size_t k = 0; k < p.size(); ++k) p[k] = edges_[k].back();
  return p;
}

std::optional<std::size_t> GroundGrid::locate(std::span<const double> x, double tol) const {
  if (x.size() != dimension()) fail(ErrorKind::dimension_mismatch, "locate: dimension mismatch");
  std::size_t flat = 0;
  for (std::size_t k = 0; k < dimension(); ++k) {
    const auto& e = edges_[k];
    double v = x[k];
    if (v < e.front()) {
      if (v < e.front() - tol) return std::nullopt;
      v = e.front();
    }
    if (v > e.back()) {
      if (v > e.back() + tol) return std::nullopt;
      v = e.back();
    }
    auto it = std::upper_bound(e.begin(), e.end(), v);
    std::size_t i = static_cast<std::size_t>(it - e.begin());
    i = (i == 0) ? 0 : i - 1;
    i = std::min(i, count(k) - 1);
    flat = flat * count(k) + i;
  }
  return flat;
}

bool GroundGrid::contains(std::span<const double> x, double tol) const {
  return locate(x, tol).has_value();
}

double GroundGrid::diameter() const {
  // sublevel sets of every supported distance are convex, so the box
  // diameter is attained at a corner pair
  const std::size_t dim = dimension();
  const std::size_t corners = std::size_t{1} << dim;
  std::vector<Point> pts(corners, Point(dim));
  for (std::size_t c = 0; c < corners; ++c)
    for (std::size_t k = 0; k < dim; ++k)
      pts[c][k] = ((c >> k) & 1u) ? edges_[k].back() : edges_[k].front();
  return nsob::diameter(pts, metric_);
}

std::vector<std::size_t> GroundGrid::forward_neighbours(std::size_t i) const {
  std::vector<std::size_t> out;
  std::size_t stride = 1;
  std::vector<std::size_t> strides(dimension());
  for (std::size_t k = dimension(); k-- > 0;) {
    strides[k] = stride;
    stride *= count(k);
  }
  for (std::size_t k = 0; k < dimension(); ++k) {
    std::size_t coord = (i / strides[k]) % count(k);
    if (coord + 1 < count(k)) out.push_back(i + strides[k]);
  }
  return out;
}

GridFunction::GridFunction(std::shared_ptr<const GroundGrid> grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (!grid_) fail(ErrorKind::invalid_input, "grid function without a grid");
  if (values_.size() != grid_->size())
    fail(ErrorKind::dimension_mismatch,
         fmt::format("grid function has {} values for {} cells", values_.size(), grid_->size()));
  for (std::size_t i = 0; i < values_.size(); ++i)
    if (!std::isfinite(values_[i]))
      fail(ErrorKind::invalid_input, fmt::format("grid function value at cell {} is not finite", i));
}

GridFunction GridFunction::sample(std::shared_ptr<const GroundGrid> grid,
                                  const std::function<double(std::span<const double>)>& f) {
  std::vector<double> v(grid->size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(grid->cell(i).center);
  return GridFunction(std::move(grid), std::move(v));
}

GridFunction GridFunction::zeros(std::shared_ptr<const GroundGrid> grid) {
  std::vector<double> v(grid->size(), 0.0);
  return GridFunction(std::move(grid), std::move(v));
}

double GridFunction::at(std::span<const double> x) const {
  auto idx = grid_->locate(x, 1e-12);
  if (!idx) fail(ErrorKind::out_of_domain, "grid function evaluated outside its grid");
  return values_[*idx];
}

double GridFunction::interpolate(std::span<const double> x) const {
  const GroundGrid& g = *grid_;
  const std::size_t dim = g.dimension();
  if (x.size() != dim) fail(ErrorKind::dimension_mismatch, "interpolate: dimension mismatch");
  if (!g.contains(x, 1e-12)) fail(ErrorKind::out_of_domain, "grid function evaluated outside its grid");
  std::vector<std::size_t> lo(dim), stride(dim);
  std::vector<double> frac(dim);
  std::size_t s = 1;
  for (std::size_t k = dim; k-- > 0;) {
    stride[k] = s;
    s *= g.count(k);
  }
  for (std::size_t k = 0; k < dim; ++k) {
    const auto& e = g.edges(k);
    const std::size_t n = g.count(k);
    auto center = [&](std::size_t i) { return 0.5 * (e[i] + e[i + 1]); };
    if (n == 1 || x[k] <= center(0)) {
      lo[k] = 0;
      frac[k] = 0.0;
    } else if (x[k] >= center(n - 1)) {
      lo[k] = n - 2;
      frac[k] = 1.0;
    } else {
      std::size_t i = static_cast<std::size_t>(std::upper_bound(e.begin(), e.end(), x[k]) - e.begin());
      i = std::min(i == 0 ? 0 : i - 1, n - 1);
      if (x[k] < center(i)) --i;
      lo[k] = std::min(i, n - 2);
      frac[k] = (x[k] - center(lo[k])) / (center(lo[k] + 1) - center(lo[k]));
    }
  }
  double total = 0.0;
  for (std::size_t corner = 0; corner < (std::size_t{1} << dim); ++corner) {
    double w = 1.0;
    std::size_t flat = 0;
    for (std::size_t k = 0; k < dim; ++k) {
      const bool up = (corner >> k) & 1u;
      if (g.count(k) == 1) {
        if (up) { w = 0.0; break; }
        continue;
      }
      w *= up ? frac[k] : 1.0 - frac[k];
      flat += (lo[k] + (up ? 1 : 0)) * stride[k];
    }
    if (w != 0.0) total += w * values_[flat];
  }
  return total;
}

}  // namespace nsob
