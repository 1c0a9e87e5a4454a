#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "nsob/incidence.hpp"

namespace nsob {

/// Row-compressed nonnegative matrix; one row per path, one column per cell.
class SparseMatrix {
 public:
  explicit SparseMatrix(std::size_t cols = 0) : cols_(cols) {}

  void add_row(const SparseRow& row);
  void add_row(std::span<const std::size_t> index, std::span<const double> weight);

  std::size_t rows() const noexcept { return row_ptr_.size() - 1; }
  std::size_t cols() const noexcept { return cols_; }
  std::span<const std::size_t> row_index(std::size_t r) const;
  std::span<const double> row_weight(std::size_t r) const;
  double row_dot(std::size_t r, std::span<const double> x) const;
  SparseMatrix scaled(double factor) const;

 private:
  std::size_t cols_;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::size_t> index_;
  std::vector<double> weight_;
};

/// minimize sum_c m_c g_c^p  subject to  W g >= b,  g >= 0.
struct PathProgram {
  SparseMatrix W;
  std::vector<double> b;
  std::vector<double> m;
  double p = 2.0;
};

struct SolverOptions {
  double tol_feas = 1e-7;  // relative, per row
  double tol_gap = 1e-6;   // relative
  std::size_t max_sweeps = 1'000'000;
};

struct Solution {
  std::vector<double> g;      // feasible density (rescaled dual reconstruction)
  double value = 0.0;         // sum m g^p
  std::vector<double> duals;  // one per row of the input program
  double dual_bound = 0.0;    // lower bound on the optimum
  double max_violation = 0.0; // max relative row violation of g
  double duality_gap = 0.0;   // (value - dual_bound) / value
  double complementarity = 0.0;
  std::size_t iterations = 0; // full sweeps
};

/// Dual coordinate ascent. Duals lambda >= 0 determine the primal through
/// stationarity, g_c = (sum_r lambda_r W_rc / (p m_c))^{1/(p-1)}; each sweep
/// maximizes the concave dual in one coordinate at a time. Rows with b = 0
/// are dropped. Throws infeasible for a row with b > 0 and no positive
/// entry, NonConvergence at the sweep cap.
Solution solve(const PathProgram& program, const SolverOptions& options = {});

struct SingleRowOptimum {
  std::vector<double> g;
  double value = 0.0;
};

/// Closed-form optimum of the one-row program (Lagrange stationarity).
SingleRowOptimum single_constraint_optimum(std::span<const double> w, double b,
                                           std::span<const double> m, double p);

/// b - W g per row; nonpositive entries mean admissible.
std::vector<double> admissibility_residual(std::span<const double> g, const PathProgram& program);

}  // namespace nsob
