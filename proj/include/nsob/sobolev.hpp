#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "nsob/field.hpp"
#include "nsob/grid.hpp"
#include "nsob/path_measure.hpp"
#include "nsob/polyline.hpp"
#include "nsob/solver.hpp"

namespace nsob {

/// (sum_c m_c |f_c|^p)^{1/p}.
double lp_norm(const GridFunction& f, double p);
double lp_norm(std::span<const double> values, std::span<const double> m, double p);

/// Continuous field through the cell-center values (see GridFunction::interpolate).
ScalarField interpolated(const GridFunction& f);

struct NewtonNorm {
  double norm = 0.0;      // lp + gradient
  double lp = 0.0;        // ||f||_p
  double gradient = 0.0;  // ||rho||_p of the minimal discrete upper gradient
  Solution solution;
};

/// ||f||_p + min ||rho||_p over discrete upper gradients on the family.
/// Path endpoints read f through interpolation between cell centers.
NewtonNorm newton_norm(const GridFunction& f, const std::vector<Polyline>& family,
                       const PathMeasure& measure, double p, const SolverOptions& options = {});

struct LatticeReport {
  double norm_f = 0.0;
  double norm_g = 0.0;
  double norm_abs_f = 0.0;
  double norm_min = 0.0;
  double norm_max = 0.0;
  double bound = 0.0;  // norm_f + norm_g + tol
  bool passed = false;
};

/// Newton norms of |f|, min(f, g), max(f, g) against norm(f) + norm(g) + tol.
LatticeReport lattice_check(const GridFunction& f, const GridFunction& g,
                            const std::vector<Polyline>& family, const PathMeasure& measure, double p,
                            double tol = 1e-6, const SolverOptions& options = {});

struct WeightedCharacterization {
  double newton = 0.0;           // under mu = omega dH^1, m = omega^p dx
  double reference = 0.0;        // ||omega f||_p + ||f'||_p in L^p(dx)
  double ratio = 0.0;            // newton / reference
  double gradient_error = 0.0;   // ||rho - |f'|/omega||_{L^p(m)} / max(||f'||_p, 1)
  NewtonNorm detail;
  bool passed = false;           // gradient_error <= tol
};

/// One-dimensional check on [a, b] with `cells` equal cells and the axis
/// path family. f_prime is differentiated numerically when absent.
WeightedCharacterization weighted_characterization_check(
    const FieldFn& f, const std::optional<FieldFn>& f_prime, const FieldFn& omega, double p,
    double a, double b, std::size_t cells, double tol, const SolverOptions& options = {});

/// Radii diam(grid) 2^{-j}, j = 0..levels.
std::vector<double> dyadic_radii(const GroundGrid& grid, std::size_t levels = 8);

/// Cells whose centers lie within distance r of center cell c (closed ball).
std::vector<std::size_t> ball_cells(const GroundGrid& grid, std::span<const double> center, double r);

/// Noncentered maximal function over balls centered at cell centers with
/// radii from the list (plus the singleton r = 0 balls): at each cell the
/// largest m-average of h over a sampled ball containing it.
GridFunction maximal_function(const GridFunction& h, const std::vector<double>& radii);

struct TruncationReport {
  double k = 0.0;
  std::vector<std::size_t> exceptional;  // E_k = {M g^p > k^p}
  std::vector<std::size_t> good;         // F_k, the complement
  GridFunction f_k;
  double lp_error = 0.0;           // ||f - f_k||_p
  double extension_constant = 0.0; // empirical Holder constant of f on F_k
  double holder_constant = 0.0;    // achieved Holder constant of f_k on all cells
  double measure_Ek = 0.0;
  double covering_constant = 0.0;  // max m(B(c, 3r)) / m(B(c, r)) over sampled balls
  double weak_type_ratio = 0.0;    // k^p m(E_k) / sum m g^p
};

/// Truncation at level k: threshold the maximal function of g^p, keep f on
/// F_k and replace it on E_k by the Holder inf-extension from F_k.
TruncationReport lipschitz_truncation(const GridFunction& f, const GridFunction& g, double k,
                                      double beta, double p, const std::vector<double>& radii);

/// Inf-extension x -> min_i (v_i + L d(x, x_i)^beta). Throws
/// incompatible_values naming a pair that violates the L bound.
ScalarField holder_extension(const std::vector<std::pair<Point, double>>& values, double L,
                             double beta, const MetricDescriptor& metric);

/// max |f_i - f_j| / d(x_i, x_j)^beta over all pairs of cells in `subset`
/// (all cells when empty).
double holder_constant(const GridFunction& f, double beta, std::span<const std::size_t> subset = {});

}  // namespace nsob
