#include "nsob/metric.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "nsob/error.hpp"

namespace nsob {

namespace {

void require_finite(std::span<const double> x) {
  for (double v : x) {
    if (!std::isfinite(v)) fail(ErrorKind::invalid_input, "non-finite coordinate");
  }
}

}  // namespace

MetricDescriptor MetricDescriptor::euclidean(std::size_t dimension) {
  if (dimension == 0) fail(ErrorKind::invalid_input, "metric dimension must be positive");
  MetricDescriptor m;
  m.kind_ = MetricKind::euclidean;
  m.base_ = BaseNorm::euclidean;
  m.dimension_ = dimension;
  m.exponents_.assign(dimension, 1.0);
  return m;
}

MetricDescriptor MetricDescriptor::anisotropic(std::vector<double> exponents,
                                               BaseNorm base,
                                               double base_exponent) {
  if (exponents.empty()) fail(ErrorKind::invalid_input, "anisotropic metric needs exponents");
  for (double a : exponents) {
    if (!std::isfinite(a) || a < 1.0)
      fail(ErrorKind::invalid_input, fmt::format("dilation exponent {} must be >= 1", a));
  }
  if (base == BaseNorm::p_norm && !(base_exponent >= 1.0 && std::isfinite(base_exponent)))
    fail(ErrorKind::invalid_input, "p_norm base exponent must be >= 1");
  MetricDescriptor m;
  m.kind_ = MetricKind::anisotropic;
  m.base_ = base;
  m.base_exponent_ = base == BaseNorm::euclidean ? 2.0 : base_exponent;
  m.dimension_ = exponents.size();
  m.exponents_ = std::move(exponents);
  return m;
}

MetricDescriptor MetricDescriptor::parabolic(std::size_t dimension) {
  if (dimension < 2) fail(ErrorKind::invalid_input, "parabolic metric needs dimension >= 2");
  std::vector<double> alpha(dimension, 1.0);
  alpha.back() = 2.0;
  return anisotropic(std::move(alpha), BaseNorm::max);
}

double MetricDescriptor::norm(std::span<const double> x) const {
  switch (base_) {
    case BaseNorm::max: {
      double r = 0.0;
      for (double v : x) r = std::max(r, std::abs(v));
      return r;
    }
    case BaseNorm::euclidean: {
      // hypot-style scaling keeps tiny and huge dilations representable
      double scale = 0.0;
      for (double v : x) scale = std::max(scale, std::abs(v));
      if (scale == 0.0 || !std::isfinite(scale)) return scale;
      double s = 0.0;
      for (double v : x) s += (v / scale) * (v / scale);
      return scale * std::sqrt(s);
    }
    case BaseNorm::p_norm: {
      double scale = 0.0;
      for (double v : x) scale = std::max(scale, std::abs(v));
      if (scale == 0.0 || !std::isfinite(scale)) return scale;
      double s = 0.0;
      for (double v : x) s += std::pow(std::abs(v) / scale, base_exponent_);
      return scale * std::pow(s, 1.0 / base_exponent_);
    }
  }
  return 0.0;
}

Point MetricDescriptor::dilate(std::span<const double> x, double lambda) const {
  if (x.size() != dimension_) fail(ErrorKind::dimension_mismatch, "dilate: dimension mismatch");
  Point out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = std::pow(lambda, exponents_[i]) * x[i];
  return out;
}

double rho_by_bisection(std::span<const double> x, const MetricDescriptor& metric) {
  if (x.size() != metric.dimension()) fail(ErrorKind::dimension_mismatch, "rho: dimension mismatch");
  require_finite(x);
  if (std::all_of(x.begin(), x.end(), [](double v) { return v == 0.0; })) return 0.0;

  const auto& alpha = metric.exponents();
  Point scaled(x.size());
  // phi(lambda) = ||T_{1/lambda} x||, strictly decreasing in lambda
  auto phi = [&](double lambda) {
    for (std::size_t i = 0; i < x.size(); ++i)
      scaled[i] = x[i] * std::exp(-alpha[i] * std::log(lambda));
    return metric.norm(scaled);
  };

  double lo = std::ldexp(1.0, -40);
  double hi = std::ldexp(1.0, 40);
  int expansions = 0;
  while (phi(lo) < 1.0 || phi(hi) > 1.0) {
    if (++expansions > 200) fail(ErrorKind::evaluation, "rho: could not bracket root");
    if (phi(lo) < 1.0) lo = lo * lo;
    if (phi(hi) > 1.0) hi = hi * hi;
    if (lo == 0.0 || !std::isfinite(hi)) fail(ErrorKind::evaluation, "rho: bracket left double range");
  }

  // geometric bisection while the bracket spans orders of magnitude
  while (hi / lo > 2.0) {
    double mid = std::sqrt(lo * hi);
    if (phi(mid) > 1.0) lo = mid; else hi = mid;
  }
  for (int it = 0; it < 400; ++it) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (hi - lo <= 1e-12 * std::max(1.0, lo)) break;
    if (phi(mid) > 1.0) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

double rho(std::span<const double> x, const MetricDescriptor& metric) {
  if (metric.kind() != MetricKind::anisotropic)
    fail(ErrorKind::invalid_input, "rho is defined for anisotropic metrics only");
  if (x.size() != metric.dimension()) fail(ErrorKind::dimension_mismatch, "rho: dimension mismatch");
  require_finite(x);
  if (metric.base_norm() == BaseNorm::max) {
    double r = 0.0;
    const auto& alpha = metric.exponents();
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i] != 0.0) r = std::max(r, std::pow(std::abs(x[i]), 1.0 / alpha[i]));
    }
    return r;
  }
  return rho_by_bisection(x, metric);
}

double distance(std::span<const double> x, std::span<const double> y,
                const MetricDescriptor& metric) {
  if (x.size() != y.size() || x.size() != metric.dimension())
    fail(ErrorKind::dimension_mismatch,
         fmt::format("distance: dimensions {} and {} vs metric {}", x.size(), y.size(),
                     metric.dimension()));
  Point diff(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) diff[i] = x[i] - y[i];
  require_finite(diff);
  if (metric.kind() == MetricKind::euclidean) {
    double s = 0.0;
    for (double v : diff) s += v * v;
    return std::sqrt(s);
  }
  return rho(diff, metric);
}

double diameter(std::span<const Point> points, const MetricDescriptor& metric) {
  if (points.empty()) fail(ErrorKind::invalid_input, "diameter of an empty point list");
  double d = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = i + 1; j < points.size(); ++j)
      d = std::max(d, distance(points[i], points[j], metric));
  return d;
}

}  // namespace nsob
