#pragma once

#include <span>
#include <vector>

namespace nsob {

using Point = std::vector<double>;

enum class MetricKind { euclidean, anisotropic };
enum class BaseNorm { max, euclidean, p_norm };

/// Translation-invariant metric on R^n. The anisotropic kind is the
/// matrix-dilation family d(x, y) = rho(x - y), where rho(z) is the unique
/// lambda with ||T_{1/lambda} z|| = 1 and T_lambda = diag(lambda^alpha_i).
/// Only diagonal dilations are supported.
class MetricDescriptor {
 public:
  static MetricDescriptor euclidean(std::size_t dimension);
  static MetricDescriptor anisotropic(std::vector<double> exponents,
                                      BaseNorm base = BaseNorm::max,
                                      double base_exponent = 2.0);
  /// alpha = (1, ..., 1, 2) with the max norm.
  static MetricDescriptor parabolic(std::size_t dimension);

  MetricKind kind() const noexcept { return kind_; }
  BaseNorm base_norm() const noexcept { return base_; }
  double base_exponent() const noexcept { return base_exponent_; }
  std::size_t dimension() const noexcept { return dimension_; }
  const std::vector<double>& exponents() const noexcept { return exponents_; }

  /// The underlying norm ||x|| (Euclidean norm for the euclidean kind).
  double norm(std::span<const double> x) const;

  /// T_lambda x.
  Point dilate(std::span<const double> x, double lambda) const;

 private:
  MetricDescriptor() = default;

  MetricKind kind_ = MetricKind::euclidean;
  BaseNorm base_ = BaseNorm::euclidean;
  double base_exponent_ = 2.0;
  std::size_t dimension_ = 0;
  std::vector<double> exponents_;
};

/// Closed form for the max base norm, bisection otherwise.
double rho(std::span<const double> x, const MetricDescriptor& metric);

/// Root of lambda -> ||T_{1/lambda} x|| = 1 by bracketed bisection,
/// regardless of base norm. Absolute tolerance 1e-12 on lambda (relative
/// for lambda > 1).
double rho_by_bisection(std::span<const double> x,
                        const MetricDescriptor& metric);

double distance(std::span<const double> x, std::span<const double> y,
                const MetricDescriptor& metric);

/// Exact maximum pairwise distance.
double diameter(std::span<const Point> points, const MetricDescriptor& metric);

}  // namespace nsob
