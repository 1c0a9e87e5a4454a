#include "nsob/sobolev.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include <fmt/format.h>

#include "nsob/error.hpp"
#include "nsob/families.hpp"
#include "nsob/gradients.hpp"
#include "nsob/parallel.hpp"
#include "nsob/quadrature.hpp"

namespace nsob {

double lp_norm(std::span<const double> values, std::span<const double> m, double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) fail(ErrorKind::invalid_input, "lp_norm needs p >= 1");
  if (values.size() != m.size()) fail(ErrorKind::dimension_mismatch, "values and measures differ in length");
  double s = 0.0;
  for (std::size_t c = 0; c < values.size(); ++c)
    if (values[c] != 0.0) s += m[c] * std::pow(std::abs(values[c]), p);
  return std::pow(s, 1.0 / p);
}

double lp_norm(const GridFunction& f, double p) { return lp_norm(f.values(), f.grid().measures(), p); }

ScalarField interpolated(const GridFunction& f) {
  auto held = std::make_shared<const GridFunction>(f);
  return ScalarField([held](std::span<const double> x) { return held->interpolate(x); });
}

NewtonNorm newton_norm(const GridFunction& f, const std::vector<Polyline>& family,
                       const PathMeasure& measure, double p, const SolverOptions& options) {
  NewtonNorm out;
  out.lp = lp_norm(f, p);
  out.solution = minimal_upper_gradient(interpolated(f), family, f.grid(), measure, p, options);
  out.gradient = std::pow(out.solution.value, 1.0 / p);
  out.norm = out.lp + out.gradient;
  return out;
}

LatticeReport lattice_check(const GridFunction& f, const GridFunction& g,
                            const std::vector<Polyline>& family, const PathMeasure& measure, double p,
                            double tol, const SolverOptions& options) {
  if (&f.grid() != &g.grid() && f.size() != g.size())
    fail(ErrorKind::dimension_mismatch, "lattice_check: f and g live on different grids");
  auto combine = [&](auto op) {
    std::vector<double> v(f.size());
    for (std::size_t c = 0; c < v.size(); ++c) v[c] = op(f[c], g[c]);
    return GridFunction(f.grid_ptr(), std::move(v));
  };
  LatticeReport r;
  r.norm_f = newton_norm(f, family, measure, p, options).norm;
  r.norm_g = newton_norm(g, family, measure, p, options).norm;
  r.norm_abs_f = newton_norm(combine([](double a, double) { return std::abs(a); }), family, measure, p, options).norm;
  r.norm_min = newton_norm(combine([](double a, double b) { return std::min(a, b); }), family, measure, p, options).norm;
  r.norm_max = newton_norm(combine([](double a, double b) { return std::max(a, b); }), family, measure, p, options).norm;
  r.bound = r.norm_f + r.norm_g + tol;
  r.passed = std::isfinite(r.norm_abs_f) && std::isfinite(r.norm_min) && std::isfinite(r.norm_max) &&
             r.norm_abs_f <= r.bound && r.norm_min <= r.bound && r.norm_max <= r.bound;
  return r;
}

WeightedCharacterization weighted_characterization_check(
    const FieldFn& f, const std::optional<FieldFn>& f_prime, const FieldFn& omega, double p,
    double a, double b, std::size_t cells, double tol, const SolverOptions& options) {
  if (!(b > a)) fail(ErrorKind::invalid_input, "interval must satisfy a < b");
  if (cells < 2) fail(ErrorKind::invalid_input, "need at least two cells");
  auto at = [](const FieldFn& fn, double x) {
    const double pt[1] = {x};
    return fn(std::span<const double>(pt, 1));
  };
  auto derivative = [&](double x) {
    if (f_prime) return at(*f_prime, x);
    const double step = 1e-6 * std::max(1.0, std::abs(x));
    return (at(f, x + step) - at(f, x - step)) / (2.0 * step);
  };

  auto grid = std::make_shared<const GroundGrid>(
      GroundGrid::uniform({a}, {b}, {cells}, MetricDescriptor::euclidean(1)).with_weight(omega, p));
  GridFunction fg = GridFunction::sample(grid, f);
  const auto family = axis_path_family(*grid);

  WeightedCharacterization out;
  out.detail = newton_norm(fg, family, PathMeasure::weighted(omega), p, options);
  out.newton = out.detail.norm;

  const double wf = integrate_midpoint([&](double x) { return std::pow(std::abs(at(omega, x) * at(f, x)), p); }, a, b);
  const double df = integrate_midpoint([&](double x) { return std::pow(std::abs(derivative(x)), p); }, a, b);
  out.reference = std::pow(wf, 1.0 / p) + std::pow(df, 1.0 / p);
  out.ratio = out.reference > 0.0 ? out.newton / out.reference : (out.newton == 0.0 ? 1.0 : INFINITY);

  std::vector<double> diff(grid->size());
  for (std::size_t c = 0; c < diff.size(); ++c) {
    const double x = grid->cell(c).center[0];
    diff[c] = out.detail.solution.g[c] - std::abs(derivative(x)) / at(omega, x);
  }
  out.gradient_error = lp_norm(diff, grid->measures(), p) / std::max(std::pow(df, 1.0 / p), 1.0);
  out.passed = out.gradient_error <= tol;
  return out;
}

std::vector<double> dyadic_radii(const GroundGrid& grid, std::size_t levels) {
  std::vector<double> r;
  const double d = grid.diameter();
  for (std::size_t j = 0; j <= levels; ++j) r.push_back(std::ldexp(d, -static_cast<int>(j)));
  return r;
}

std::vector<std::size_t> ball_cells(const GroundGrid& grid, std::span<const double> center, double r) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (distance(grid.cell(i).center, center, grid.metric()) <= r) out.push_back(i);
  return out;
}

GridFunction maximal_function(const GridFunction& h, const std::vector<double>& radii) {
  if (radii.empty()) fail(ErrorKind::invalid_input, "maximal_function needs at least one radius");
  for (double r : radii)
    if (!(r >= 0.0) || !std::isfinite(r)) fail(ErrorKind::invalid_input, "radii must be finite and >= 0");
  for (double v : h.values())
    if (v < 0.0) fail(ErrorKind::invalid_input, "maximal_function needs h >= 0");
  const GroundGrid& grid = h.grid();
  const std::size_t n = grid.size();
  std::vector<double> rs = radii;
  rs.push_back(0.0);
  std::sort(rs.begin(), rs.end());
  rs.erase(std::unique(rs.begin(), rs.end()), rs.end());
  const std::size_t R = rs.size();

  // ball averages, one per (center, radius)
  std::vector<double> avg(n * R, 0.0);
  parallel_for(n, [&](std::size_t j) {
    std::vector<double> mass(R, 0.0), integral(R, 0.0);
    const auto& cj = grid.cell(j).center;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = distance(grid.cell(i).center, cj, grid.metric());
      const auto first = static_cast<std::size_t>(std::lower_bound(rs.begin(), rs.end(), d) - rs.begin());
      if (first < R) {
        mass[first] += grid.cell(i).measure;
        integral[first] += grid.cell(i).measure * h[i];
      }
    }
    double m = 0.0, s = 0.0;
    for (std::size_t k = 0; k < R; ++k) {
      m += mass[k];
      s += integral[k];
      avg[j * R + k] = m > 0.0 ? s / m : 0.0;
    }
  });

  std::vector<double> out(n, 0.0);
  parallel_for(n, [&](std::size_t i) {
    const auto& ci = grid.cell(i).center;
    double best = h[i];
    for (std::size_t j = 0; j < n; ++j) {
      const double d = distance(ci, grid.cell(j).center, grid.metric());
      for (std::size_t k = static_cast<std::size_t>(std::lower_bound(rs.begin(), rs.end(), d) - rs.begin());
           k < R; ++k)
        best = std::max(best, avg[j * R + k]);
    }
    out[i] = best;
  });
  return GridFunction(h.grid_ptr(), std::move(out));
}

double holder_constant(const GridFunction& f, double beta, std::span<const std::size_t> subset) {
  const GroundGrid& grid = f.grid();
  std::vector<std::size_t> all;
  if (subset.empty()) {
    all.resize(grid.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    subset = all;
  }
  std::vector<double> row_max(subset.size(), 0.0);
  parallel_for(subset.size(), [&](std::size_t a) {
    const std::size_t i = subset[a];
    double best = 0.0;
    for (std::size_t b = a + 1; b < subset.size(); ++b) {
      const std::size_t j = subset[b];
      const double d = distance(grid.cell(i).center, grid.cell(j).center, grid.metric());
      if (d > 0.0) best = std::max(best, std::abs(f[i] - f[j]) / std::pow(d, beta));
    }
    row_max[a] = best;
  });
  return row_max.empty() ? 0.0 : *std::max_element(row_max.begin(), row_max.end());
}

namespace {

double covering_constant(const GroundGrid& grid, const std::vector<double>& radii) {
  std::vector<double> worst(grid.size(), 1.0);
  parallel_for(grid.size(), [&](std::size_t j) {
    const auto& cj = grid.cell(j).center;
    for (double r : radii) {
      if (!(r > 0.0)) continue;
      double inner = 0.0, outer = 0.0;
      for (std::size_t i = 0; i < grid.size(); ++i) {
        const double d = distance(grid.cell(i).center, cj, grid.metric());
        if (d <= 3.0 * r) outer += grid.cell(i).measure;
        if (d <= r) inner += grid.cell(i).measure;
      }
      if (inner > 0.0) worst[j] = std::max(worst[j], outer / inner);
    }
  });
  return *std::max_element(worst.begin(), worst.end());
}

}  // namespace

TruncationReport lipschitz_truncation(const GridFunction& f, const GridFunction& g, double k,
                                      double beta, double p, const std::vector<double>& radii) {
  if (!(k > 0.0) || !std::isfinite(k)) fail(ErrorKind::invalid_input, "truncation level k must be positive");
  if (!(beta > 0.0 && beta <= 1.0)) fail(ErrorKind::invalid_input, "beta must lie in (0, 1]");
  if (!(p >= 1.0)) fail(ErrorKind::invalid_input, "p must be >= 1");
  if (f.size() != g.size()) fail(ErrorKind::dimension_mismatch, "f and g live on different grids");
  const GroundGrid& grid = f.grid();

  std::vector<double> gp(g.size());
  for (std::size_t c = 0; c < gp.size(); ++c) {
    if (g[c] < 0.0) fail(ErrorKind::invalid_input, "g must be >= 0");
    gp[c] = std::pow(g[c], p);
  }
  const GridFunction Mgp = maximal_function(GridFunction(g.grid_ptr(), gp), radii);

  TruncationReport out{k, {}, {}, f, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0};
  const double level = std::pow(k, p);
  for (std::size_t c = 0; c < grid.size(); ++c) {
    if (Mgp[c] > level) {
      out.exceptional.push_back(c);
      out.measure_Ek += grid.cell(c).measure;
    } else {
      out.good.push_back(c);
    }
  }
  if (out.good.empty())
    fail(ErrorKind::all_exceptional,
         fmt::format("every cell is exceptional at k = {}; try a larger k", k));

  out.extension_constant = holder_constant(f, beta, out.good);
  std::vector<double> values = f.values();
  for (std::size_t c : out.exceptional) {
    double best = INFINITY;
    for (std::size_t y : out.good) {
      const double d = distance(grid.cell(c).center, grid.cell(y).center, grid.metric());
      best = std::min(best, f[y] + out.extension_constant * std::pow(d, beta));
    }
    values[c] = best;
  }
  out.f_k = GridFunction(f.grid_ptr(), values);

  std::vector<double> diff(values.size());
  for (std::size_t c = 0; c < diff.size(); ++c) diff[c] = f[c] - values[c];
  out.lp_error = lp_norm(diff, grid.measures(), p);
  out.holder_constant = holder_constant(out.f_k, beta);

  out.covering_constant = covering_constant(grid, radii);
  double energy = 0.0;
  for (std::size_t c = 0; c < gp.size(); ++c) energy += grid.cell(c).measure * gp[c];
  out.weak_type_ratio = energy > 0.0 ? level * out.measure_Ek / energy : 0.0;
  return out;
}

ScalarField holder_extension(const std::vector<std::pair<Point, double>>& values, double L,
                             double beta, const MetricDescriptor& metric) {
  if (values.empty()) fail(ErrorKind::invalid_input, "holder_extension needs at least one point");
  if (!(L >= 0.0) || !std::isfinite(L)) fail(ErrorKind::invalid_input, "L must be finite and >= 0");
  if (!(beta > 0.0 && beta <= 1.0)) fail(ErrorKind::invalid_input, "beta must lie in (0, 1]");
  for (std::size_t i = 0; i < values.size(); ++i) {
    for (std::size_t j = i + 1; j < values.size(); ++j) {
      const double gap = std::abs(values[i].second - values[j].second);
      const double allowed = L * std::pow(distance(values[i].first, values[j].first, metric), beta);
      if (gap > allowed + 1e-12 * std::max(1.0, allowed))
        fail(ErrorKind::incompatible_values,
             fmt::format("points {} and {} differ by {} but the Holder bound allows {}", i, j, gap, allowed));
    }
  }
  auto data = std::make_shared<const std::vector<std::pair<Point, double>>>(values);
  return ScalarField([data, L, beta, metric](std::span<const double> x) {
    double best = INFINITY;
    for (const auto& [pt, v] : *data) {
      const double d = distance(x, pt, metric);
      if (d == 0.0) return v;
      best = std::min(best, v + L * std::pow(d, beta));
    }
    return best;
  });
}

}  // namespace nsob
