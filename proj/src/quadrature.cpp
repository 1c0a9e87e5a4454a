#include "nsob/quadrature.hpp"

#include <cmath>
#include <queue>
#include <vector>

#include <fmt/format.h>

#include "nsob/error.hpp"

namespace nsob {

namespace {

double midpoint_sum(const std::function<double(double)>& f, double a, double h, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double v = f(a + (static_cast<double>(i) + 0.5) * h);
    if (!std::isfinite(v))
      fail(ErrorKind::evaluation,
           fmt::format("non-finite integrand at {}", a + (static_cast<double>(i) + 0.5) * h));
    s += v;
  }
  return s * h;
}

}  // namespace

double integrate_midpoint(const std::function<double(double)>& f, double a, double b,
                          const MidpointOptions& options) {
  if (a == b) return 0.0;
  double sign = 1.0;
  if (b < a) {
    std::swap(a, b);
    sign = -1.0;
  }
  std::size_t n = std::max<std::size_t>(1, options.min_intervals);
  double prev = midpoint_sum(f, a, (b - a) / static_cast<double>(n), n);
  while (true) {
    n *= 2;
    if (n > options.max_intervals)
      fail(ErrorKind::evaluation,
           fmt::format("midpoint quadrature on [{}, {}] did not converge in {} intervals", a, b,
                       options.max_intervals));
    double cur = midpoint_sum(f, a, (b - a) / static_cast<double>(n), n);
    if (std::abs(cur - prev) <= options.rel_tol * std::abs(cur)) return sign * cur;
    prev = cur;
  }
}

namespace {

struct BoxEstimate {
  std::vector<double> lower;
  std::vector<double> upper;
  double coarse = 0.0;
  double fine = 0.0;
  double error = 0.0;
};

struct ByError {
  bool operator()(const BoxEstimate& a, const BoxEstimate& b) const { return a.error < b.error; }
};

class BoxIntegrator {
 public:
  BoxIntegrator(const std::function<double(std::span<const double>)>& f, std::size_t dim)
      : f_(f), dim_(dim), point_(dim) {}

  BoxEstimate estimate(std::vector<double> lower, std::vector<double> upper) {
    BoxEstimate e;
    e.coarse = gauss(lower, upper);
    const std::size_t children = std::size_t{1} << dim_;
    std::vector<double> lo(dim_), hi(dim_);
    for (std::size_t c = 0; c < children; ++c) {
      for (std::size_t k = 0; k < dim_; ++k) {
        const double mid = 0.5 * (lower[k] + upper[k]);
        lo[k] = ((c >> k) & 1u) ? mid : lower[k];
        hi[k] = ((c >> k) & 1u) ? upper[k] : mid;
      }
      e.fine += gauss(lo, hi);
    }
    e.error = std::abs(e.fine - e.coarse);
    e.lower = std::move(lower);
    e.upper = std::move(upper);
    return e;
  }

  std::size_t evaluations() const noexcept { return evaluations_; }

 private:
  // tensor 3-point Gauss-Legendre; nodes stay off the box faces
  double gauss(const std::vector<double>& lower, const std::vector<double>& upper) {
    static const double node[3] = {-0.7745966692414834, 0.0, 0.7745966692414834};
    static const double weight[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
    std::size_t count = 1;
    for (std::size_t k = 0; k < dim_; ++k) count *= 3;
    double sum = 0.0;
    for (std::size_t idx = 0; idx < count; ++idx) {
      std::size_t r = idx;
      double w = 1.0;
      for (std::size_t k = 0; k < dim_; ++k) {
        const std::size_t j = r % 3;
        r /= 3;
        const double half = 0.5 * (upper[k] - lower[k]);
        point_[k] = lower[k] + half * (1.0 + node[j]);
        w *= weight[j] * half;
      }
      sum += w * eval();
    }
    return sum;
  }

  double eval() {
    ++evaluations_;
    double v = f_(point_);
    if (!std::isfinite(v))
      fail(ErrorKind::evaluation, "non-finite integrand in box quadrature");
    return v;
  }

  const std::function<double(std::span<const double>)>& f_;
  std::size_t dim_;
  std::vector<double> point_;
  std::size_t evaluations_ = 0;
};

}  // namespace

double integrate_box(const std::function<double(std::span<const double>)>& f,
                     std::span<const double> lower, std::span<const double> upper,
                     const BoxQuadratureOptions& options) {
  const std::size_t dim = lower.size();
  if (upper.size() != dim || dim == 0)
    fail(ErrorKind::dimension_mismatch, "integrate_box: bad box");
  for (std::size_t k = 0; k < dim; ++k) {
    if (!(upper[k] > lower[k])) return 0.0;
  }
  BoxIntegrator integrator(f, dim);
  std::priority_queue<BoxEstimate, std::vector<BoxEstimate>, ByError> queue;

  // Seed with a 2^n tensor split so symmetric integrands cannot fool the
  // first coarse/fine comparison.
  std::vector<BoxEstimate> seeds;
  {
    const std::size_t per_axis = 2;
    std::size_t total = 1;
    for (std::size_t k = 0; k < dim; ++k) total *= per_axis;
    for (std::size_t idx = 0; idx < total; ++idx) {
      std::vector<double> lo(dim), hi(dim);
      std::size_t r = idx;
      for (std::size_t k = 0; k < dim; ++k) {
        std::size_t j = r % per_axis;
        r /= per_axis;
        double h = (upper[k] - lower[k]) / per_axis;
        lo[k] = lower[k] + h * static_cast<double>(j);
        hi[k] = (j + 1 == per_axis) ? upper[k] : lower[k] + h * static_cast<double>(j + 1);
      }
      queue.push(integrator.estimate(std::move(lo), std::move(hi)));
    }
  }

  double total = 0.0;
  double total_error = 0.0;
  auto recompute = [&] {
    // summing a copy keeps the result independent of floating drift
    auto copy = queue;
    total = 0.0;
    total_error = 0.0;
    while (!copy.empty()) {
      total += copy.top().fine;
      total_error += copy.top().error;
      copy.pop();
    }
  };
  recompute();

  std::size_t since_recompute = 0;
  while (total_error > options.rel_tol * std::abs(total)) {
    if (integrator.evaluations() > options.max_evaluations)
      fail(ErrorKind::evaluation, "box quadrature did not converge");
    BoxEstimate top = queue.top();
    queue.pop();
    total -= top.fine;
    total_error -= top.error;
    const std::size_t children = std::size_t{1} << dim;
    for (std::size_t c = 0; c < children; ++c) {
      std::vector<double> lo(dim), hi(dim);
      for (std::size_t k = 0; k < dim; ++k) {
        double mid = 0.5 * (top.lower[k] + top.upper[k]);
        if ((c >> k) & 1u) {
          lo[k] = mid;
          hi[k] = top.upper[k];
        } else {
          lo[k] = top.lower[k];
          hi[k] = mid;
        }
      }
      BoxEstimate child = integrator.estimate(std::move(lo), std::move(hi));
      total += child.fine;
      total_error += child.error;
      queue.push(std::move(child));
    }
    if (++since_recompute == 4096) {
      recompute();
      since_recompute = 0;
    }
  }
  recompute();
  return total;
}

}  // namespace nsob
