#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "nsob/metric.hpp"

namespace nsob {

/// Axis-aligned box cell. `measure` is the space measure m_c, which need not
/// equal the Lebesgue volume.
struct Cell {
  Point center;
  Point widths;
  double measure = 0.0;
};

/// Discretized ground space: a rectilinear tensor grid of boxes. Cells are
/// boxes in ambient coordinates whatever the metric; the metric only enters
/// through distances. Cell order is row-major with the last axis fastest.
class GroundGrid {
 public:
  GroundGrid(std::vector<std::vector<double>> edges, MetricDescriptor metric);

  static GroundGrid uniform(const Point& lower, const Point& upper,
                            const std::vector<std::size_t>& counts,
                            MetricDescriptor metric);

  /// Same geometry, measures replaced.
  GroundGrid with_measures(std::vector<double> measures) const;

  /// m_c = integral over the cell of weight(x)^power dx.
  GroundGrid with_weight(const std::function<double(std::span<const double>)>& weight,
                         double power = 1.0) const;

  std::size_t dimension() const noexcept { return edges_.size(); }
  std::size_t size() const noexcept { return cells_.size(); }
  const Cell& cell(std::size_t i) const { return cells_.at(i); }
  const std::vector<Cell>& cells() const noexcept { return cells_; }
  std::vector<double> measures() const;
  double total_measure() const;
  const MetricDescriptor& metric() const noexcept { return metric_; }
  const std::vector<double>& edges(std::size_t axis) const { return edges_.at(axis); }
  std::size_t count(std::size_t axis) const { return edges_.at(axis).size() - 1; }
  Point lower() const;
  Point upper() const;

  /// Cell containing x; cells are half-open except along the upper faces of
  /// the grid. Points within `tol` outside the box snap to the boundary cell.
  std::optional<std::size_t> locate(std::span<const double> x, double tol = 0.0) const;
  bool contains(std::span<const double> x, double tol = 0.0) const;

  /// Metric diameter of the bounding box.
  double diameter() const;

  /// Flat indices of the axis neighbours (+1 along each axis) of cell i.
  std::vector<std::size_t> forward_neighbours(std::size_t i) const;

 private:
  std::vector<std::vector<double>> edges_;
  MetricDescriptor metric_;
  std::vector<Cell> cells_;
};

/// Values per cell center, tied to a grid.
class GridFunction {
 public:
  GridFunction(std::shared_ptr<const GroundGrid> grid, std::vector<double> values);

  static GridFunction sample(std::shared_ptr<const GroundGrid> grid,
                             const std::function<double(std::span<const double>)>& f);
  static GridFunction zeros(std::shared_ptr<const GroundGrid> grid);

  const GroundGrid& grid() const noexcept { return *grid_; }
  const std::shared_ptr<const GroundGrid>& grid_ptr() const noexcept { return grid_; }
  const std::vector<double>& values() const noexcept { return values_; }
  std::vector<double>& values() noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }

  /// Value of the cell containing x.
  double at(std::span<const double> x) const;

  /// Multilinear interpolation between cell centers, constant beyond the
  /// outermost centers. Continuous, and exact for affine data inside the
  /// center lattice.
  double interpolate(std::span<const double> x) const;

 private:
  std::shared_ptr<const GroundGrid> grid_;
  std::vector<double> values_;
};

}  // namespace nsob
