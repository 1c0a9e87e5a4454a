#include "nsob/modulus.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "nsob/error.hpp"
#include "nsob/incidence.hpp"

namespace nsob {

PathProgram family_program(const std::vector<Polyline>& family, const GroundGrid& grid,
                           const PathMeasure& measure, double p, double rhs) {
  PathProgram prog{SparseMatrix(grid.size()), {}, grid.measures(), p};
  for (std::size_t i = 0; i < family.size(); ++i) {
    SparseRow row;
    try {
      row = incidence(family[i], grid, measure);
    } catch (const Error& e) {
      throw Error(e.kind(), fmt::format("path {}: {}", i, e.what()));
    }
    prog.W.add_row(row);
    prog.b.push_back(rhs);
  }
  return prog;
}

ModulusResult modulus_p(const std::vector<Polyline>& family, const GroundGrid& grid,
                        const PathMeasure& measure, double p, const SolverOptions& options) {
  if (!(p > 1.0) || !std::isfinite(p))
    fail(ErrorKind::invalid_input, fmt::format("exponent p = {} must lie in (1, inf)", p));
  ModulusResult out;
  out.extremal_g.assign(grid.size(), 0.0);
  if (family.empty()) return out;

  PathProgram prog = family_program(family, grid, measure, p);
  const auto& m = prog.m;
  // Rows touching a null cell are satisfied for free by a finite value
  // there; the rest go to the solver.
  PathProgram reduced{SparseMatrix(prog.W.cols()), {}, m, p};
  std::vector<double> free_g(grid.size(), 0.0);
  for (std::size_t r = 0; r < prog.W.rows(); ++r) {
    const auto idx = prog.W.row_index(r);
    const auto w = prog.W.row_weight(r);
    double total = 0.0;
    std::optional<std::size_t> null_cell;
    for (std::size_t k = 0; k < idx.size(); ++k) {
      total += w[k];
      if (w[k] > 0.0 && m[idx[k]] == 0.0) null_cell = k;
    }
    if (!(total > 0.0)) {
      out.value = std::numeric_limits<double>::infinity();
      out.offending_path = r;
      return out;
    }
    if (null_cell) {
      const std::size_t c = idx[*null_cell];
      free_g[c] = std::max(free_g[c], 1.0 / w[*null_cell]);
      continue;
    }
    reduced.W.add_row(idx, w);
    reduced.b.push_back(1.0);
  }

  Solution sol = solve(reduced, options);
  for (std::size_t c = 0; c < free_g.size(); ++c) sol.g[c] = std::max(sol.g[c], free_g[c]);
  out.value = sol.value;
  out.extremal_g = sol.g;
  out.max_violation = sol.max_violation;
  out.duality_gap = sol.duality_gap;
  out.dual_bound = sol.dual_bound;
  out.iterations = sol.iterations;
  out.per_path_mass.resize(prog.W.rows());
  for (std::size_t r = 0; r < prog.W.rows(); ++r) out.per_path_mass[r] = prog.W.row_dot(r, sol.g);
  return out;
}

double modulus_bound_from_witness(std::span<const double> g, const std::vector<Polyline>& family,
                                  const GroundGrid& grid, const PathMeasure& measure, double M,
                                  double p, std::optional<double> reference, double tolerance) {
  if (!(M > 0.0) || !std::isfinite(M)) fail(ErrorKind::invalid_input, "witness level M must be positive");
  if (!(p > 1.0)) fail(ErrorKind::invalid_input, "exponent p must exceed 1");
  if (g.size() != grid.size())
    fail(ErrorKind::dimension_mismatch,
         fmt::format("witness has {} values for {} cells", g.size(), grid.size()));
  for (double v : g)
    if (!(v >= 0.0) || !std::isfinite(v)) fail(ErrorKind::invalid_input, "witness must be finite and >= 0");
  for (std::size_t i = 0; i < family.size(); ++i) {
    const double mass = incidence(family[i], grid, measure).dot(g);
    if (mass < M * (1.0 - 1e-12))
      fail(ErrorKind::witness_invalid,
           fmt::format("path {} carries witness mass {} < M = {}", i, mass, M));
  }
  double energy = 0.0;
  for (std::size_t c = 0; c < g.size(); ++c)
    if (g[c] > 0.0) energy += grid.cell(c).measure * std::pow(g[c], p);
  const double bound = std::pow(M, -p) * energy;
  if (reference && bound < *reference - tolerance * std::max(1.0, std::abs(*reference)))
    fail(ErrorKind::witness_invalid,
         fmt::format("witness bound {} lies below the computed modulus {}", bound, *reference));
  return bound;
}

}  // namespace nsob
