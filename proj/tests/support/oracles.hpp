#pragma once

// Reference computations written independently of the library, used to pin
// expected values in tests.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace oracle {

// Adaptive Simpson with Richardson correction.
inline double simpson(const std::function<double(double)>& f, double a, double b, double tol = 1e-12,
                      int depth = 50) {
  std::function<double(double, double, double, double, double, double, double, int)> rec =
      [&](double lo, double hi, double flo, double fmid, double fhi, double whole, double eps, int d) {
        const double mid = 0.5 * (lo + hi);
        const double lm = 0.5 * (lo + mid), rm = 0.5 * (mid + hi);
        const double flm = f(lm), frm = f(rm);
        const double left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid);
        const double right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi);
        if (d <= 0 || std::abs(left + right - whole) <= 15.0 * eps)
          return left + right + (left + right - whole) / 15.0;
        return rec(lo, mid, flo, flm, fmid, left, 0.5 * eps, d - 1) +
               rec(mid, hi, fmid, frm, fhi, right, 0.5 * eps, d - 1);
      };
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  return rec(a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), tol, depth);
}

// Closed-form single-row optimum, written out directly.
struct RowOptimum {
  double value;
  std::vector<double> g;
};
inline RowOptimum single_row(const std::vector<double>& w, double b, const std::vector<double>& m, double p) {
  // Lagrange: p m_c g_c^{p-1} = lambda w_c  =>  g_c = t (w_c / m_c)^{1/(p-1)}
  double denom = 0.0;
  for (std::size_t c = 0; c < w.size(); ++c)
    if (w[c] > 0.0) denom += w[c] * std::pow(w[c] / m[c], 1.0 / (p - 1.0));
  const double t = b / denom;
  RowOptimum out{0.0, std::vector<double>(w.size(), 0.0)};
  for (std::size_t c = 0; c < w.size(); ++c) {
    if (w[c] > 0.0) out.g[c] = t * std::pow(w[c] / m[c], 1.0 / (p - 1.0));
    out.value += m[c] * std::pow(out.g[c], p);
  }
  return out;
}

// Grid search over g1 in [0, hi] for a row of length <= 2 with the row
// held tight through g2.
inline double grid_search_row(const std::vector<double>& w, double b, const std::vector<double>& m, double p,
                              double hi = 2.0, double step = 1e-4) {
  double best = std::numeric_limits<double>::infinity();
  for (double g1 = 0.0; g1 <= hi + 1e-15; g1 += step) {
    double value = m[0] * std::pow(g1, p);
    if (w.size() == 1) {
      if (w[0] * g1 < b) continue;
    } else {
      const double g2 = std::max(0.0, (b - w[0] * g1) / w[1]);
      value += m[1] * std::pow(g2, p);
    }
    best = std::min(best, value);
  }
  return best;
}

// max_i |x_i|^{1/alpha_i}, the max-norm anisotropic gauge.
inline double max_gauge(std::span<const double> x, std::span<const double> alpha) {
  double r = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) r = std::max(r, std::pow(std::abs(x[i]), 1.0 / alpha[i]));
  return r;
}

// Plain bisection for lambda with ||T_{1/lambda} x||_2 = 1.
inline double euclidean_gauge(std::span<const double> x, std::span<const double> alpha) {
  auto norm_at = [&](double lam) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double v = x[i] / std::pow(lam, alpha[i]);
      s += v * v;
    }
    return std::sqrt(s);
  };
  double lo = 1e-9, hi = 1e9;
  for (int it = 0; it < 400; ++it) {
    const double mid = std::sqrt(lo * hi);
    (norm_at(mid) > 1.0 ? lo : hi) = mid;
  }
  return std::sqrt(lo * hi);
}

}  // namespace oracle
