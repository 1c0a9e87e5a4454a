#include "nsob/gradients.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <fmt/format.h>

#include "nsob/error.hpp"
#include "nsob/incidence.hpp"
#include "nsob/parallel.hpp"

namespace nsob {

namespace {

struct Check {
  CheckKind kind;
  std::size_t piece;
  Point x, y;
  double lhs, rhs;
};

void record(GradientReport& report, std::size_t id, const Check& c, double tol) {
  ++report.checked_count;
  const double slack = c.rhs - c.lhs;
  if (report.checked_count == 1) report.min_slack = slack;
  report.min_slack = std::min(report.min_slack, slack);
  if (c.lhs > 0.0)
    report.max_relative_violation = std::max(report.max_relative_violation, (c.lhs - c.rhs) / c.lhs);
  if (slack < -tol) report.violations.push_back({id, c.kind, c.piece, c.x, c.y, c.lhs, c.rhs, slack});
}

double endpoint_gap(const ScalarField& f, const Polyline& path) {
  const double a = f(path.front());
  const double b = f(path.back());
  if (!std::isfinite(a) || !std::isfinite(b))
    fail(ErrorKind::evaluation, "f is not finite at a path endpoint");
  return std::abs(b - a);
}

}  // namespace

GradientReport verify_upper_gradient(const ScalarField& f, const ScalarField& rho,
                                     const std::vector<Polyline>& family, const PathMeasure& measure,
                                     double tol_check) {
  if (!(tol_check >= 0.0)) fail(ErrorKind::invalid_input, "tol_check must be >= 0");
  struct PathResult {
    std::vector<Check> checks;
    bool unverifiable = false;
    bool infinite = false;
  };
  std::vector<PathResult> results(family.size());
  parallel_for(family.size(), [&](std::size_t i) {
    PathResult& out = results[i];
    try {
      const Polyline& path = family[i];
      out.checks.push_back({CheckKind::whole_path, 0, path.front(), path.back(), endpoint_gap(f, path),
                            path_integral(rho, path, measure)});
      const auto pieces = dyadic_subpaths(path);
      for (std::size_t j = 0; j < pieces.size(); ++j)
        out.checks.push_back({CheckKind::dyadic_piece, j, pieces[j].front(), pieces[j].back(),
                              endpoint_gap(f, pieces[j]), path_integral(rho, pieces[j], measure)});
      for (const auto& c : out.checks)
        if (!std::isfinite(c.rhs)) out.infinite = true;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::evaluation) throw;
      out.unverifiable = true;
      out.checks.clear();
    }
  });

  GradientReport report;
  for (std::size_t i = 0; i < results.size(); ++i) {
    if (results[i].unverifiable) {
      report.unverifiable.push_back(i);
      continue;
    }
    if (results[i].infinite) report.infinite_integral = true;
    for (const auto& c : results[i].checks) record(report, i, c, tol_check);
  }
  return report;
}

Solution minimal_upper_gradient(const ScalarField& f, const std::vector<Polyline>& family,
                                const GroundGrid& grid, const PathMeasure& measure, double p,
                                const SolverOptions& options) {
  PathProgram prog{SparseMatrix(grid.size()), {}, grid.measures(), p};
  std::vector<SparseRow> rows(family.size() * 9);
  std::vector<double> rhs(family.size() * 9);
  parallel_for(family.size(), [&](std::size_t i) {
    const Polyline& path = family[i];
    try {
      rows[9 * i] = incidence(path, grid, measure);
      rhs[9 * i] = endpoint_gap(f, path);
      const auto pieces = dyadic_subpaths(path);
      for (std::size_t j = 0; j < pieces.size(); ++j) {
        rows[9 * i + 1 + j] = incidence(pieces[j], grid, measure);
        rhs[9 * i + 1 + j] = endpoint_gap(f, pieces[j]);
      }
    } catch (const Error& e) {
      throw Error(e.kind(), fmt::format("path {}: {}", i, e.what()));
    }
  });
  for (std::size_t r = 0; r < rows.size(); ++r) {
    prog.W.add_row(rows[r]);
    prog.b.push_back(rhs[r]);
  }
  return solve(prog, options);
}

std::vector<double> repair_weak_gradient(std::span<const double> rho, std::span<const double> witness_g,
                                         double eps, double p, std::span<const double> m) {
  if (!(eps > 0.0) || !std::isfinite(eps)) fail(ErrorKind::invalid_input, "eps must be positive");
  if (!(p >= 1.0)) fail(ErrorKind::invalid_input, "p must be >= 1");
  if (rho.size() != witness_g.size() || rho.size() != m.size())
    fail(ErrorKind::dimension_mismatch, "rho, g and m must have equal length");
  double gp = 0.0;
  for (std::size_t c = 0; c < m.size(); ++c) {
    if (witness_g[c] < 0.0) fail(ErrorKind::invalid_input, "witness g must be >= 0");
    gp += m[c] * std::pow(witness_g[c], p);
  }
  const double gnorm = std::pow(gp, 1.0 / p);
  if (!std::isfinite(gnorm)) fail(ErrorKind::evaluation, "witness g has infinite L^p norm");
  const double factor = eps / (1.0 + gnorm);
  std::vector<double> out(rho.size());
  double dp = 0.0;
  for (std::size_t c = 0; c < out.size(); ++c) {
    out[c] = rho[c] + factor * witness_g[c];
    if (out[c] < rho[c]) fail(ErrorKind::evaluation, "repaired gradient fell below rho");
    dp += m[c] * std::pow(out[c] - rho[c], p);
  }
  if (!(std::pow(dp, 1.0 / p) < eps)) fail(ErrorKind::evaluation, "repair moved rho by eps or more");
  return out;
}

GradientReport acc_check(const ScalarField& f, const ParametrizedPath& path, const ScalarField& rho,
                         const AccOptions& options) {
  const double h = path.h();
  const Polyline& base = path.base();
  const PathMeasure& measure = path.measure();
  GradientReport report;

  // integral of rho over gamma_h([s, t]) via the restricted polyline
  auto piece_integral = [&](double s, double t) {
    const double a = path.parameter_at(s);
    const double b = path.parameter_at(t);
    if (!(b > a)) return 0.0;
    return path_integral(rho, subpath(base, a, b), measure);
  };
  auto value = [&](double s) {
    const double v = f(path.at(s));
    if (!std::isfinite(v)) fail(ErrorKind::evaluation, "f is not finite on the path");
    return v;
  };

  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  try {
    for (std::size_t i = 0; i < options.n_pairs; ++i) {
      // log-uniform lengths between h 1e-6 and h
      const double len = h * std::pow(10.0, -6.0 * unit(rng));
      const double s = (h - len) * unit(rng);
      const double t = std::min(h, s + len);
      const double rhs = piece_integral(s, t);
      if (!std::isfinite(rhs)) report.infinite_integral = true;
      record(report, 0, {CheckKind::parameter_pair, i, path.at(s), path.at(t), std::abs(value(t) - value(s)), rhs},
             options.tol);
    }
    std::size_t sample = 0;
    for (double delta : {h / 10.0, h / 100.0}) {
      const std::size_t n = std::max<std::size_t>(1, options.intervals);
      const double block = h / static_cast<double>(n);
      const double piece = delta / static_cast<double>(n);
      double lhs = 0.0, rhs = 0.0;
      double first = h, last = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double s = block * static_cast<double>(j) + (block - piece) * unit(rng);
        const double t = s + piece;
        lhs += std::abs(value(t) - value(s));
        rhs += piece_integral(s, t);
        first = std::min(first, s);
        last = std::max(last, t);
      }
      if (!std::isfinite(rhs)) report.infinite_integral = true;
      record(report, 0, {CheckKind::interval_union, sample++, path.at(first), path.at(last), lhs, rhs},
             options.tol);
    }
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::evaluation) throw;
    report.infinite_integral = true;
  }
  return report;
}

GradientReport hajlasz_verify(const ScalarField& f, const ScalarField& g, double beta,
                              const std::vector<std::pair<Point, Point>>& pairs,
                              const MetricDescriptor& metric) {
  if (!(beta > 0.0 && beta <= 1.0)) fail(ErrorKind::invalid_input, "beta must lie in (0, 1]");
  GradientReport report;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& [x, y] = pairs[i];
    const double lhs = std::abs(f(x) - f(y));
    const double rhs = std::pow(distance(x, y, metric), beta) * (g(x) + g(y));
    if (!std::isfinite(lhs) || !std::isfinite(rhs)) {
      report.unverifiable.push_back(i);
      continue;
    }
    record(report, i, {CheckKind::point_pair, i, x, y, lhs, rhs}, 1e-12);
  }
  return report;
}

Solution hajlasz_minimal(std::span<const double> f, const std::vector<Point>& points, double beta,
                         double p, std::span<const double> m, const MetricDescriptor& metric,
                         const HajlaszOptions& options) {
  const std::size_t n = points.size();
  if (f.size() != n || m.size() != n)
    fail(ErrorKind::dimension_mismatch, "f, points and weights must have equal length");
  if (!(beta > 0.0 && beta <= 1.0)) fail(ErrorKind::invalid_input, "beta must lie in (0, 1]");
  for (double w : m)
    if (!(w > 0.0) || !std::isfinite(w)) fail(ErrorKind::invalid_input, "point weights must be positive");

  PathProgram prog{SparseMatrix(n), {}, std::vector<double>(m.begin(), m.end()), p};
  auto add_pair = [&](std::size_t i, std::size_t j) {
    const double df = std::abs(f[i] - f[j]);
    const double d = distance(points[i], points[j], metric);
    if (d == 0.0) {
      if (df != 0.0)
        fail(ErrorKind::infeasible,
             fmt::format("points {} and {} coincide but f differs by {}", i, j, df));
      return;
    }
    const std::size_t idx[2] = {std::min(i, j), std::max(i, j)};
    const double w[2] = {1.0, 1.0};
    prog.W.add_row(idx, w);
    prog.b.push_back(df / std::pow(d, beta));
  };
  if (n <= options.full_enumeration_limit) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) add_pair(i, j);
  } else {
    std::mt19937_64 rng(options.seed);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    for (std::size_t s = 0; s < options.sampled_pairs; ++s) {
      const std::size_t i = pick(rng);
      const std::size_t j = pick(rng);
      if (i != j) add_pair(i, j);
    }
  }
  return solve(prog, options.solver);
}

}  // namespace nsob
