#include <cmath>
#include <vector>

#include "doctest.h"
#include "nsob/error.hpp"
#include "nsob/solver.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace nsob;

namespace {

PathProgram dense(const std::vector<std::vector<double>>& rows, std::vector<double> b, std::vector<double> m,
                  double p) {
  PathProgram prog{SparseMatrix(m.size()), std::move(b), std::move(m), p};
  for (const auto& r : rows) {
    std::vector<std::size_t> idx;
    std::vector<double> w;
    for (std::size_t c = 0; c < r.size(); ++c)
      if (r[c] > 0.0) {
        idx.push_back(c);
        w.push_back(r[c]);
      }
    prog.W.add_row(idx, w);
  }
  return prog;
}

PathProgram random_program(gen::Rng& rng, std::size_t rows, std::size_t cols, double p) {
  std::vector<std::vector<double>> w(rows, std::vector<double>(cols, 0.0));
  for (auto& r : w) {
    const std::size_t support = rng.between(1, cols);
    for (std::size_t k = 0; k < support; ++k) r[rng.index(cols)] = rng.uniform(0.1, 2.0);
  }
  std::vector<double> m(cols);
  for (auto& v : m) v = rng.uniform(0.2, 3.0);
  return dense(w, std::vector<double>(rows, 1.0), m, p);
}

SolverOptions tight() {
  SolverOptions o;
  o.tol_feas = 1e-9;
  o.tol_gap = 1e-8;
  return o;
}

}  // namespace

TEST_CASE("solve examples") {
  const auto one = solve(dense({{2.0}}, {1.0}, {1.0}, 2.0));
  CHECK(one.g[0] == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(one.value == doctest::Approx(0.25).epsilon(1e-6));

  const auto zero = solve(dense({{1.0, 2.0}, {0.5, 0.0}}, {0.0, 0.0}, {1.0, 1.0}, 2.0));
  CHECK(zero.value == 0.0);
  for (double g : zero.g) CHECK(g == 0.0);

  for (double p : {1.5, 2.0, 3.0}) {
    const std::vector<double> m{1.0, 2.0, 0.5, 4.0};
    const auto both = solve(dense({{1.0, 2.0, 0.0, 0.0}, {0.0, 0.0, 3.0, 0.5}}, {1.0, 1.0}, m, p), tight());
    const auto a = single_constraint_optimum(std::vector<double>{1.0, 2.0}, 1.0, std::vector<double>{1.0, 2.0}, p);
    const auto b = single_constraint_optimum(std::vector<double>{3.0, 0.5}, 1.0, std::vector<double>{0.5, 4.0}, p);
    CHECK(both.value == doctest::Approx(a.value + b.value).epsilon(1e-7));
  }
}

TEST_CASE("single constraint optimum against independent oracles") {
  const auto a = single_constraint_optimum(std::vector<double>{2.0}, 1.0, std::vector<double>{1.0}, 2.0);
  CHECK(a.value == doctest::Approx(0.25));
  CHECK(a.g[0] == doctest::Approx(0.5));
  CHECK(oracle::grid_search_row({2.0}, 1.0, {1.0}, 2.0) == doctest::Approx(0.25).epsilon(1e-3));

  const auto b = single_constraint_optimum(std::vector<double>{1.0, 1.0}, 1.0, std::vector<double>{1.0, 1.0}, 2.0);
  CHECK(b.value == doctest::Approx(0.5));
  CHECK(b.g[0] == doctest::Approx(0.5));
  CHECK(b.g[1] == doctest::Approx(0.5));
  CHECK(oracle::grid_search_row({1.0, 1.0}, 1.0, {1.0, 1.0}, 2.0) == doctest::Approx(0.5).epsilon(1e-3));

  for (double p : {1.3, 2.0, 2.5, 4.0}) {
    const std::vector<double> w{0.7, 1.9}, m{1.4, 0.6};
    const auto lib = single_constraint_optimum(w, 1.0, m, p);
    const auto ref = oracle::single_row(w, 1.0, m, p);
    CHECK(lib.value == doctest::Approx(ref.value).epsilon(1e-12));
    CHECK(lib.value == doctest::Approx(oracle::grid_search_row(w, 1.0, m, p, 2.0, 1e-5)).epsilon(1e-4));
    const auto twice = single_constraint_optimum(w, 2.0, m, p);
    CHECK(twice.value == doctest::Approx(std::pow(2.0, p) * lib.value).epsilon(1e-12));
  }
  CHECK_THROWS_AS(single_constraint_optimum(std::vector<double>{0.0, 0.0}, 1.0, std::vector<double>{1.0, 1.0}, 2.0),
                  Error);
}

TEST_CASE("solver agrees with the single row oracle") {
  gen::Rng rng(21);
  for (int trial = 0; trial < 40; ++trial) {
    const double p = rng.uniform(1.2, 4.0);
    auto prog = random_program(rng, 1, 6, p);
    const auto sol = solve(prog, tight());
    std::vector<double> w(prog.m.size(), 0.0);
    const auto idx = prog.W.row_index(0);
    const auto wt = prog.W.row_weight(0);
    for (std::size_t k = 0; k < idx.size(); ++k) w[idx[k]] = wt[k];
    const auto ref = oracle::single_row(w, 1.0, prog.m, p);
    CHECK(sol.value == doctest::Approx(ref.value).epsilon(1e-6));
  }
}

TEST_CASE("solution certificates") {
  gen::Rng rng(22);
  for (int trial = 0; trial < 30; ++trial) {
    const double p = rng.uniform(1.3, 3.5);
    const auto prog = random_program(rng, rng.between(2, 12), rng.between(3, 15), p);
    const auto sol = solve(prog);
    for (double g : sol.g) CHECK(g >= 0.0);
    CHECK(sol.dual_bound <= sol.value * (1 + 1e-12));
    CHECK(sol.duality_gap <= 1e-6);
    CHECK(sol.max_violation <= 1e-7);
    CHECK(sol.complementarity <= 1e-5);
    double recomputed = 0.0;
    for (std::size_t c = 0; c < sol.g.size(); ++c) recomputed += prog.m[c] * std::pow(sol.g[c], p);
    CHECK(recomputed == doctest::Approx(sol.value).epsilon(1e-12));
    const auto again = solve(prog);
    CHECK(std::abs(again.value - sol.value) <= 10 * 1e-6 * sol.value);
  }
}

TEST_CASE("scaling law") {
  gen::Rng rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    const double p = rng.uniform(1.5, 3.0);
    const auto prog = random_program(rng, 6, 8, p);
    const double base = solve(prog, tight()).value;
    for (double s : {0.5, 2.0, 4.0}) {
      PathProgram scaled = prog;
      scaled.W = prog.W.scaled(s);
      CHECK(solve(scaled, tight()).value == doctest::Approx(base * std::pow(s, -p)).epsilon(1e-5));
    }
  }
}

TEST_CASE("adding a row never decreases the optimum") {
  gen::Rng rng(24);
  for (int trial = 0; trial < 20; ++trial) {
    const double p = rng.uniform(1.5, 3.0);
    const auto big = random_program(rng, 8, 10, p);
    PathProgram small{SparseMatrix(big.m.size()), {}, big.m, p};
    for (std::size_t r = 0; r + 1 < big.W.rows(); ++r) {
      small.W.add_row(big.W.row_index(r), big.W.row_weight(r));
      small.b.push_back(1.0);
    }
    CHECK(solve(small, tight()).value <= solve(big, tight()).value * (1 + 1e-7));
  }
}

TEST_CASE("solver errors") {
  CHECK_THROWS_AS(solve(dense({{0.0, 0.0}}, {1.0}, {1.0, 1.0}, 2.0)), Error);
  try {
    solve(dense({{0.0, 0.0}}, {1.0}, {1.0, 1.0}, 2.0));
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::infeasible);
  }
  CHECK_THROWS_AS(solve(dense({{1.0}}, {1.0}, {1.0}, 1.0)), Error);
  CHECK_THROWS_AS(solve(dense({{1.0}}, {1.0}, {1.0}, 0.5)), Error);

  gen::Rng rng(25);
  const auto prog = random_program(rng, 12, 10, 2.5);
  SolverOptions capped;
  capped.max_sweeps = 1;
  capped.tol_gap = 1e-14;
  capped.tol_feas = 1e-14;
  try {
    solve(prog, capped);
    FAIL("expected non-convergence");
  } catch (const NonConvergence& e) {
    CHECK(e.best_g().size() == prog.m.size());
    CHECK(e.best_value() > 0.0);
  }
}

TEST_CASE("admissibility residual") {
  const auto prog = dense({{1.0, 2.0}, {0.5, 0.5}}, {1.0, 1.0}, {1.0, 1.0}, 2.0);
  const std::vector<double> zero{0.0, 0.0};
  for (double r : admissibility_residual(zero, prog)) CHECK(r == 1.0);

  const auto opt = single_constraint_optimum(std::vector<double>{1.0, 2.0}, 1.0, std::vector<double>{1.0, 1.0}, 2.0);
  const auto single = dense({{1.0, 2.0}}, {1.0}, {1.0, 1.0}, 2.0);
  CHECK(std::abs(admissibility_residual(opt.g, single)[0]) <= 1e-12);
  const std::vector<double> doubled{2 * opt.g[0], 2 * opt.g[1]};
  CHECK(admissibility_residual(doubled, single)[0] == doctest::Approx(-1.0).epsilon(1e-12));

  const std::vector<double> wrong{1.0};
  CHECK_THROWS_AS(admissibility_residual(wrong, prog), Error);
}
