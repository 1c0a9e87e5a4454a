#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "nsob/grid.hpp"
#include "nsob/path_measure.hpp"
#include "nsob/polyline.hpp"
#include "nsob/solver.hpp"

namespace nsob {

struct ModulusResult {
  double value = 0.0;  // +inf when some path meets no positive-measure cell
  std::vector<double> extremal_g;
  std::vector<double> per_path_mass;  // integral of g over each path
  double max_violation = 0.0;
  double duality_gap = 0.0;
  double dual_bound = 0.0;
  std::size_t iterations = 0;
  std::optional<std::size_t> offending_path;  // set when value is +inf
};

/// Build the incidence program of a family: one row per path, b = rhs.
PathProgram family_program(const std::vector<Polyline>& family, const GroundGrid& grid,
                           const PathMeasure& measure, double p, double rhs = 1.0);

/// Discrete p-modulus: minimize sum m_c g_c^p over g >= 0 with
/// sum_c w_{gamma,c} g_c >= 1 for every path.
ModulusResult modulus_p(const std::vector<Polyline>& family, const GroundGrid& grid,
                        const PathMeasure& measure, double p, const SolverOptions& options = {});

/// M^{-p} sum m_c g_c^p, an upper bound for the modulus since g / M is
/// admissible. Throws witness_invalid naming the first path with mass < M.
/// With `reference` set, also checks bound >= reference - tolerance.
double modulus_bound_from_witness(std::span<const double> g, const std::vector<Polyline>& family,
                                  const GroundGrid& grid, const PathMeasure& measure, double M,
                                  double p, std::optional<double> reference = std::nullopt,
                                  double tolerance = 1e-6);

}  // namespace nsob
