#include "nsob/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "nsob/error.hpp"

namespace nsob {

void SparseMatrix::add_row(const SparseRow& row) { add_row(row.index, row.weight); }

void SparseMatrix::add_row(std::span<const std::size_t> index, std::span<const double> weight) {
  if (index.size() != weight.size()) fail(ErrorKind::dimension_mismatch, "sparse row: length mismatch");
  for (std::size_t i = 0; i < index.size(); ++i) {
    if (index[i] >= cols_)
      fail(ErrorKind::dimension_mismatch, fmt::format("column {} out of range {}", index[i], cols_));
    if (!std::isfinite(weight[i]) || weight[i] < 0.0)
      fail(ErrorKind::invalid_input, fmt::format("matrix entry {} must be finite and >= 0", weight[i]));
    index_.push_back(index[i]);
    weight_.push_back(weight[i]);
  }
  row_ptr_.push_back(index_.size());
}

std::span<const std::size_t> SparseMatrix::row_index(std::size_t r) const {
  return {index_.data() + row_ptr_[r], row_ptr_[r + 1] - row_ptr_[r]};
}

std::span<const double> SparseMatrix::row_weight(std::size_t r) const {
  return {weight_.data() + row_ptr_[r], row_ptr_[r + 1] - row_ptr_[r]};
}

double SparseMatrix::row_dot(std::size_t r, std::span<const double> x) const {
  double s = 0.0;
  for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) s += weight_[k] * x[index_[k]];
  return s;
}

SparseMatrix SparseMatrix::scaled(double factor) const {
  SparseMatrix out = *this;
  for (double& w : out.weight_) w *= factor;
  return out;
}

namespace {

void validate(const PathProgram& prog) {
  if (!(prog.p > 1.0) || !std::isfinite(prog.p))
    fail(ErrorKind::invalid_input, fmt::format("exponent p = {} must lie in (1, inf)", prog.p));
  if (prog.b.size() != prog.W.rows())
    fail(ErrorKind::dimension_mismatch,
         fmt::format("{} right-hand sides for {} rows", prog.b.size(), prog.W.rows()));
  if (prog.m.size() != prog.W.cols())
    fail(ErrorKind::dimension_mismatch,
         fmt::format("{} cell measures for {} columns", prog.m.size(), prog.W.cols()));
  for (double v : prog.b)
    if (!std::isfinite(v) || v < 0.0) fail(ErrorKind::invalid_input, "right-hand side must be finite and >= 0");
  for (double v : prog.m)
    if (!std::isfinite(v) || v < 0.0) fail(ErrorKind::invalid_input, "cell measure must be finite and >= 0");
}

class DualAscent {
 public:
  DualAscent(const PathProgram& prog, std::vector<std::size_t> rows)
      : prog_(prog), rows_(std::move(rows)), q_(1.0 / (prog.p - 1.0)),
        lambda_(prog.W.rows(), 0.0), a_(prog.W.cols(), 0.0) {}

  void sweep() {
    for (std::size_t r : rows_) update_row(r);
  }

  std::vector<double> primal() const {
    std::vector<double> g(a_.size(), 0.0);
    for (std::size_t c = 0; c < g.size(); ++c) g[c] = g_of(c, a_[c]);
    return g;
  }

  double dual_value(const std::vector<double>& g) const {
    double lb = 0.0;
    for (std::size_t r : rows_) lb += lambda_[r] * prog_.b[r];
    double obj = 0.0;
    for (std::size_t c = 0; c < g.size(); ++c)
      if (g[c] > 0.0) obj += prog_.m[c] * std::pow(g[c], prog_.p);
    return lb - (prog_.p - 1.0) * obj;
  }

  const std::vector<double>& lambda() const noexcept { return lambda_; }

 private:
  double g_of(std::size_t c, double a) const {
    if (a <= 0.0) return 0.0;
    return std::pow(a / (prog_.p * prog_.m[c]), q_);
  }

  // F(lambda) = sum_c W_rc g_c(a_c^- + lambda W_rc)
  double row_value(std::span<const std::size_t> idx, std::span<const double> w,
                   const std::vector<double>& base, double lambda, double* deriv) const {
    double f = 0.0;
    double df = 0.0;
    for (std::size_t k = 0; k < idx.size(); ++k) {
      const std::size_t c = idx[k];
      const double a = base[k] + lambda * w[k];
      if (a <= 0.0) continue;
      const double scale = prog_.p * prog_.m[c];
      const double g = std::pow(a / scale, q_);
      f += w[k] * g;
      if (deriv) df += w[k] * w[k] * q_ * g / a;
    }
    if (deriv) *deriv = df;
    return f;
  }

  void update_row(std::size_t r) {
    const auto idx = prog_.W.row_index(r);
    const auto w = prog_.W.row_weight(r);
    const double b = prog_.b[r];
    const double old = lambda_[r];
    base_.resize(idx.size());
    for (std::size_t k = 0; k < idx.size(); ++k)
      base_[k] = std::max(0.0, a_[idx[k]] - old * w[k]);

    double next = 0.0;
    if (row_value(idx, w, base_, 0.0, nullptr) < b) {
      if (prog_.p == 2.0) {
        // F is affine in lambda
        double f0 = 0.0, slope = 0.0;
        for (std::size_t k = 0; k < idx.size(); ++k) {
          const double inv = 1.0 / (2.0 * prog_.m[idx[k]]);
          f0 += w[k] * base_[k] * inv;
          slope += w[k] * w[k] * inv;
        }
        next = (b - f0) / slope;
      } else {
        next = solve_row(idx, w, b, old);
      }
    }
    next = std::max(0.0, next);
    lambda_[r] = next;
    for (std::size_t k = 0; k < idx.size(); ++k) a_[idx[k]] = base_[k] + next * w[k];
  }

  double solve_row(std::span<const std::size_t> idx, std::span<const double> w, double b,
                   double guess) const {
    // root with base = 0 bounds the true root from above
    double s = 0.0;
    for (std::size_t k = 0; k < idx.size(); ++k)
      if (w[k] > 0.0) s += std::pow(w[k], 1.0 + q_) * std::pow(prog_.p * prog_.m[idx[k]], -q_);
    double hi = std::pow(b / s, prog_.p - 1.0);
    double lo = 0.0;
    if (!std::isfinite(hi)) hi = std::numeric_limits<double>::max();
    double x = (guess > lo && guess < hi) ? guess : 0.5 * (lo + hi);
    for (int it = 0; it < 300; ++it) {
      double df = 0.0;
      const double f = row_value(idx, w, base_, x, &df) - b;
      if (std::abs(f) <= 1e-14 * b) return x;
      if (f > 0.0) hi = x; else lo = x;
      if (hi - lo <= 1e-16 * hi) break;
      double step = (df > 0.0 && std::isfinite(df)) ? x - f / df : lo - 1.0;
      if (!(step > lo && step < hi)) step = 0.5 * (lo + hi);
      x = step;
    }
    return 0.5 * (lo + hi);
  }

  const PathProgram& prog_;
  std::vector<std::size_t> rows_;
  double q_;
  std::vector<double> lambda_;
  std::vector<double> a_;
  std::vector<double> base_;
};

}  // namespace

Solution solve(const PathProgram& prog, const SolverOptions& options) {
  validate(prog);
  if (!(options.tol_feas > 0.0) || !(options.tol_gap > 0.0))
    fail(ErrorKind::invalid_input, "solver tolerances must be positive");

  std::vector<std::size_t> active;
  std::vector<char> used(prog.W.cols(), 0);
  for (std::size_t r = 0; r < prog.W.rows(); ++r) {
    if (prog.b[r] == 0.0) continue;
    bool any = false;
    for (std::size_t k = 0; k < prog.W.row_index(r).size(); ++k) {
      if (prog.W.row_weight(r)[k] > 0.0) {
        any = true;
        used[prog.W.row_index(r)[k]] = 1;
      }
    }
    if (!any)
      fail(ErrorKind::infeasible,
           fmt::format("row {} has b = {} but no positive entry; value is +inf", r, prog.b[r]));
    active.push_back(r);
  }
  for (std::size_t c = 0; c < used.size(); ++c)
    if (used[c] && !(prog.m[c] > 0.0))
      fail(ErrorKind::invalid_input, fmt::format("cell {} is used by a path but has zero measure", c));

  Solution sol;
  sol.duals.assign(prog.W.rows(), 0.0);
  if (active.empty()) {
    sol.g.assign(prog.W.cols(), 0.0);
    return sol;
  }

  DualAscent ascent(prog, active);
  std::vector<double> best_g;
  double best_value = std::numeric_limits<double>::infinity();
  for (std::size_t sweep = 1; sweep <= options.max_sweeps; ++sweep) {
    ascent.sweep();
    std::vector<double> g = ascent.primal();

    double raw_violation = 0.0;
    double scale = 1.0;
    for (std::size_t r : active) {
      const double wg = prog.W.row_dot(r, g);
      raw_violation = std::max(raw_violation, (prog.b[r] - wg) / prog.b[r]);
      scale = wg > 0.0 ? std::max(scale, prog.b[r] / wg) : std::numeric_limits<double>::infinity();
      if (!std::isfinite(scale)) break;
    }
    const double dual = ascent.dual_value(g);
    if (!std::isfinite(scale)) continue;
    for (double& v : g) v *= scale;
    double value = 0.0;
    for (std::size_t c = 0; c < g.size(); ++c)
      if (g[c] > 0.0) value += prog.m[c] * std::pow(g[c], prog.p);
    const double gap = value > 0.0 ? (value - dual) / value : 0.0;
    if (value < best_value) {
      best_value = value;
      best_g = g;
    }
    if (raw_violation <= options.tol_feas && gap <= options.tol_gap) {
      sol.g = std::move(g);
      sol.value = value;
      sol.dual_bound = dual;
      sol.duality_gap = gap;
      sol.iterations = sweep;
      sol.duals = ascent.lambda();
      double lb = 0.0;
      for (std::size_t r : active) {
        const double wg = prog.W.row_dot(r, sol.g);
        sol.max_violation = std::max(sol.max_violation, std::max(0.0, (prog.b[r] - wg) / prog.b[r]));
        lb += sol.duals[r] * prog.b[r];
      }
      for (std::size_t r : active) {
        const double slack = prog.W.row_dot(r, sol.g) - prog.b[r];
        sol.complementarity = std::max(sol.complementarity, sol.duals[r] * slack / std::max(lb, 1e-300));
      }
      return sol;
    }
  }
  throw NonConvergence(fmt::format("dual coordinate ascent did not converge in {} sweeps",
                                   options.max_sweeps),
                       std::move(best_g), best_value);
}

SingleRowOptimum single_constraint_optimum(std::span<const double> w, double b,
                                           std::span<const double> m, double p) {
  if (w.size() != m.size()) fail(ErrorKind::dimension_mismatch, "w and m lengths differ");
  if (!(p > 1.0) || !std::isfinite(p)) fail(ErrorKind::invalid_input, "p must lie in (1, inf)");
  if (!(b > 0.0)) fail(ErrorKind::invalid_input, "b must be positive");
  const double pc = p / (p - 1.0);
  double S = 0.0;
  for (std::size_t c = 0; c < w.size(); ++c) {
    if (w[c] < 0.0 || !std::isfinite(w[c])) fail(ErrorKind::invalid_input, "w must be finite and >= 0");
    if (w[c] == 0.0) continue;
    if (!(m[c] > 0.0)) fail(ErrorKind::invalid_input, "m must be positive where w > 0");
    S += std::pow(w[c], pc) * std::pow(m[c], 1.0 - pc);
  }
  if (!(S > 0.0)) fail(ErrorKind::invalid_input, "single_constraint_optimum: all-zero w");
  SingleRowOptimum out;
  out.value = std::pow(b, p) * std::pow(S, -(p - 1.0));
  out.g.assign(w.size(), 0.0);
  for (std::size_t c = 0; c < w.size(); ++c)
    if (w[c] > 0.0) out.g[c] = b * std::pow(w[c] / m[c], 1.0 / (p - 1.0)) / S;
  return out;
}

std::vector<double> admissibility_residual(std::span<const double> g, const PathProgram& prog) {
  if (g.size() != prog.W.cols())
    fail(ErrorKind::dimension_mismatch,
         fmt::format("density has {} entries for {} columns", g.size(), prog.W.cols()));
  if (prog.b.size() != prog.W.rows()) fail(ErrorKind::dimension_mismatch, "b length differs from row count");
  std::vector<double> res(prog.W.rows());
  for (std::size_t r = 0; r < res.size(); ++r) res[r] = prog.b[r] - prog.W.row_dot(r, g);
  return res;
}

}  // namespace nsob
