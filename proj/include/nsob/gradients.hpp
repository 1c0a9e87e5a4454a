#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "nsob/field.hpp"
#include "nsob/grid.hpp"
#include "nsob/parametrize.hpp"
#include "nsob/path_measure.hpp"
#include "nsob/polyline.hpp"
#include "nsob/solver.hpp"

namespace nsob {

enum class CheckKind { whole_path, dyadic_piece, parameter_pair, interval_union, point_pair };

/// One inequality |f(x) - f(y)| <= rhs that failed.
struct GradientViolation {
  std::size_t path = 0;    // path or pair index
  CheckKind kind = CheckKind::whole_path;
  std::size_t piece = 0;   // dyadic piece index, or sample index
  Point x, y;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;      // rhs - lhs
};

struct GradientReport {
  std::vector<GradientViolation> violations;
  double max_relative_violation = 0.0;  // max over checks of (lhs - rhs) / lhs, floored at 0
  std::size_t checked_count = 0;
  double min_slack = 0.0;
  std::vector<std::size_t> unverifiable;  // paths whose evaluation failed
  bool infinite_integral = false;         // some integral of rho diverged

  bool passed() const noexcept { return violations.empty() && unverifiable.empty() && !infinite_integral; }
};

/// Check |f(x) - f(y)| <= integral of rho + tol_check on every path and on its
/// eight dyadic pieces.
GradientReport verify_upper_gradient(const ScalarField& f, const ScalarField& rho,
                                     const std::vector<Polyline>& family, const PathMeasure& measure,
                                     double tol_check = 1e-9);

/// Smallest discrete rho (in sum m rho^p) with integral of rho over each path
/// and each dyadic piece at least |f(end) - f(start)|.
Solution minimal_upper_gradient(const ScalarField& f, const std::vector<Polyline>& family,
                                const GroundGrid& grid, const PathMeasure& measure, double p,
                                const SolverOptions& options = {});

/// rho + eps g / (1 + ||g||_p); checks the result dominates rho and sits
/// within eps of it in L^p(m).
std::vector<double> repair_weak_gradient(std::span<const double> rho, std::span<const double> witness_g,
                                         double eps, double p, std::span<const double> m);

struct AccOptions {
  std::size_t n_pairs = 200;
  std::uint64_t seed = 1;
  double tol = 1e-9;
  std::size_t intervals = 5;  // pieces in each disjoint union
};

/// Along a mu-parametrized path: |f(gamma_h(s)) - f(gamma_h(t))| <= integral of rho
/// over the piece, on random (s, t), plus the same bound summed over disjoint
/// unions of total length h/10 and h/100.
GradientReport acc_check(const ScalarField& f, const ParametrizedPath& path, const ScalarField& rho,
                         const AccOptions& options = {});

/// |f(x) - f(y)| <= d(x, y)^beta (g(x) + g(y)) per pair, absolute tolerance 1e-12.
GradientReport hajlasz_verify(const ScalarField& f, const ScalarField& g, double beta,
                              const std::vector<std::pair<Point, Point>>& pairs,
                              const MetricDescriptor& metric);

struct HajlaszOptions {
  std::size_t full_enumeration_limit = 2000;
  std::size_t sampled_pairs = 2'000'000;
  std::uint64_t seed = 1;
  SolverOptions solver;
};

/// Discrete Hajlasz seminorm: minimize sum m_i g_i^p subject to
/// g_i + g_j >= |f_i - f_j| / d(x_i, x_j)^beta over all pairs (sampled when
/// there are more points than the enumeration limit).
Solution hajlasz_minimal(std::span<const double> f, const std::vector<Point>& points, double beta,
                         double p, std::span<const double> m, const MetricDescriptor& metric,
                         const HajlaszOptions& options = {});

}  // namespace nsob
