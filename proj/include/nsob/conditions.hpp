#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "nsob/field.hpp"
#include "nsob/grid.hpp"
#include "nsob/path_measure.hpp"
#include "nsob/polyline.hpp"
#include "nsob/quadrature.hpp"

namespace nsob {

/// How the integral signs of the Poincare and two-weight displays are read.
///   standard:  Poincare sides are m-averages; A_pq and growth use plain
///              integrals with the explicit |Q| normalisation.
///   alternate: the Poincare right side is a plain integral over lambda B;
///              A_pq and growth integrals are averages over Q.
enum class AveragingConvention { standard, alternate };

struct Ball {
  Point center;
  double radius = 0.0;
};

/// Axis-aligned cube center +- half_side.
struct Cube {
  Point center;
  double half_side = 0.0;
  double volume() const;
};

struct PathWitness {
  std::size_t path = 0;
  int piece = -1;  // -1 for the whole path, 0..7 for a dyadic piece
};

struct PairWitness {
  std::size_t i = 0;
  std::size_t j = 0;
};

using Witness = std::variant<std::monostate, Ball, Cube, PathWitness, PairWitness>;

/// Best constants are maxima over finite samples, so they bound the true
/// suprema from below.
struct ConditionReport {
  double best_constant = 0.0;
  Witness witness;
  std::size_t samples_checked = 0;
  std::size_t skipped = 0;
  std::size_t hard_violations = 0;
  std::map<std::string, double> parameters;
  std::vector<double> ratios;  // one per checked sample, in input order
};

// Per-sample ratios. Each checker's best constant is the max of these, so a
// witness can be re-evaluated exactly.

struct PoincareTerms {
  double lhs = 0.0;
  double rhs = 0.0;  // diam(B)^beta (...)^{1/p}
  bool empty = false;
};
PoincareTerms poincare_terms(const GridFunction& f, const GridFunction& rho, const Ball& ball,
                             double beta, double lambda_dilation, double p,
                             AveragingConvention convention = AveragingConvention::standard);

double arc_chord_ratio(const Polyline& path, const PathMeasure& measure, double beta,
                       const MetricDescriptor& metric);

double apq_ratio(const FieldFn& w1, const FieldFn& w2, double p, double q, double alpha, const Cube& cube,
                 AveragingConvention convention = AveragingConvention::standard,
                 const BoxQuadratureOptions& options = {});

double growth_ratio(const FieldFn& omega, double p, double q, double n, const Cube& cube,
                    AveragingConvention convention = AveragingConvention::standard,
                    const BoxQuadratureOptions& options = {});

/// A_pq ratio with both weights frozen at the cube center.
double apq_frozen_ratio(const FieldFn& w1, const FieldFn& w2, double p, double q, double alpha,
                        const Cube& cube);

// Checkers.

/// max over balls of lhs / rhs. Balls whose dilation leaves the grid or that
/// contain no cell are skipped; rhs = 0 with lhs > 0 is a hard violation.
ConditionReport poincare_constant(const GridFunction& f, const GridFunction& rho,
                                  const std::vector<Ball>& balls, double beta, double lambda_dilation,
                                  double p, AveragingConvention convention = AveragingConvention::standard);

/// max over paths and their dyadic pieces of diam(Im)^beta / mu(Im).
ConditionReport arc_chord_constant(const std::vector<Polyline>& family, const PathMeasure& measure,
                                   double beta, const MetricDescriptor& metric);

ConditionReport apq_check(const FieldFn& w1, const FieldFn& w2, double p, double q, double alpha,
                          const std::vector<Cube>& cubes,
                          AveragingConvention convention = AveragingConvention::standard);

ConditionReport growth_check(const FieldFn& omega, double p, double q, double n,
                             const std::vector<Cube>& cubes,
                             AveragingConvention convention = AveragingConvention::standard);

/// q = (n - lambda p) p / (n - p) for the pair (1, |x|^{-lambda p}).
double power_weight_exponent(double n, double p, double lambda);

struct BetaFromGrowth {
  double beta = 0.0;
  bool degenerate = false;  // n = p
};
BetaFromGrowth poincare_beta_from_growth(double delta, double q, double p, double n);

struct AhlforsReport {
  double lower = 0.0;  // min m(B(x, r)) / r^N
  double upper = 0.0;  // max
  Ball lower_witness, upper_witness;
  std::size_t samples_checked = 0;
  std::size_t skipped = 0;
};
AhlforsReport ahlfors_check(const GroundGrid& grid, double N, const std::vector<double>& radii,
                            const std::vector<Point>& centers);

/// max |f_i - f_j| / d^alpha with alpha = beta - N/p over cell pairs.
ConditionReport embedding_holder_check(const GridFunction& f, const GridFunction& g, double beta,
                                       double N, double p,
                                       const std::vector<std::pair<std::size_t, std::size_t>>& pairs);

/// ||u - u_X||_{p*} / (diam(X)^{beta - 1/q} ||g||_p), 1/p* = 1/p - 1/(N q).
ConditionReport embedding_pstar_check(const GridFunction& u, const GridFunction& g, double q, double p,
                                      double N, double beta);

// Sample families.

/// Balls at every `stride`-th cell center for each radius whose lambda
/// dilate stays inside the grid.
std::vector<Ball> ball_family(const GroundGrid& grid, const std::vector<double>& radii,
                              double lambda_dilation, std::size_t stride = 1);

/// Origin-centered cubes with half sides 2^lo .. 2^hi.
std::vector<Cube> origin_cubes(std::size_t n, int lo, int hi);

/// Three half sides per decade in [r_min, r_max], each as an origin-centered
/// cube and as a cube shifted along the first axis to |x0| = shift R.
std::vector<Cube> cube_family(std::size_t n, double r_min, double r_max, double shift = 4.0);

/// Per-axis half extent of the metric ball of radius r (a box containing it).
Point ball_extent(const MetricDescriptor& metric, double r);

}  // namespace nsob
