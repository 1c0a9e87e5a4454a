#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace nsob {

struct MidpointOptions {
  double rel_tol = 1e-9;
  std::size_t min_intervals = 16;
  std::size_t max_intervals = std::size_t{1} << 20;
};

/// Composite midpoint rule on [a, b] with dyadic refinement until two
/// successive estimates agree to rel_tol. Midpoints never touch the
/// endpoints, so integrable endpoint singularities are evaluable.
/// Throws ErrorKind::evaluation on non-finite samples or when the cap is hit.
double integrate_midpoint(const std::function<double(double)>& f, double a, double b,
                          const MidpointOptions& options = {});

struct BoxQuadratureOptions {
  double rel_tol = 1e-8;
  std::size_t max_evaluations = 8'000'000;
};

/// Adaptive tensor Gauss-Legendre (3 points per axis) cubature over an
/// axis-aligned box. The box with the largest coarse-vs-children discrepancy
/// is split dyadically along every axis until the summed discrepancy drops
/// below rel_tol of the estimate.
double integrate_box(const std::function<double(std::span<const double>)>& f,
                     std::span<const double> lower, std::span<const double> upper,
                     const BoxQuadratureOptions& options = {});

}  // namespace nsob
