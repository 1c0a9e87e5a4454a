#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "nsob/error.hpp"
#include "nsob/families.hpp"
#include "nsob/incidence.hpp"
#include "nsob/modulus.hpp"
#include "support/generators.hpp"

using namespace nsob;

namespace {

GroundGrid unit_grid(std::size_t n) {
  return GroundGrid::uniform({0, 0}, {1, 1}, {n, n}, MetricDescriptor::euclidean(2));
}

std::vector<Polyline> random_family(gen::Rng& rng, std::size_t count) {
  std::vector<Polyline> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(rng.monotone_path({0.01, 0.01}, {0.99, 0.99}, 3));
  return out;
}

SolverOptions tight() {
  SolverOptions o;
  o.tol_feas = 1e-9;
  o.tol_gap = 1e-8;
  return o;
}

constexpr double tol = 1e-6;

}  // namespace

TEST_CASE("modulus examples") {
  const auto grid = unit_grid(4);
  CHECK(modulus_p({}, grid, PathMeasure::arc_length(), 2.0).value == 0.0);

  // a horizontal path inside one cell: single tube value m / L^2
  const Polyline tube({{0.05, 0.1}, {0.2, 0.1}});
  const auto r = modulus_p({tube}, grid, PathMeasure::arc_length(), 2.0, tight());
  const double m = grid.cell(0).measure, L = 0.15;
  CHECK(r.value == doctest::Approx(m / (L * L)).epsilon(1e-7));
  CHECK(r.per_path_mass[0] >= 1.0 - 1e-7);
  double recomputed = 0.0;
  for (std::size_t c = 0; c < grid.size(); ++c) recomputed += grid.cell(c).measure * std::pow(r.extremal_g[c], 2.0);
  CHECK(std::abs(recomputed - r.value) <= 1e-12 * r.value);
}

TEST_CASE("modulus is monotone and subadditive") {
  gen::Rng rng(31);
  const auto grid = unit_grid(8);
  const auto measure = PathMeasure::arc_length();
  for (int trial = 0; trial < 50; ++trial) {
    const double p = rng.uniform(1.5, 3.0);
    const auto a = random_family(rng, rng.between(1, 4));
    const auto b = random_family(rng, rng.between(1, 4));
    auto both = a;
    both.insert(both.end(), b.begin(), b.end());
    const double ma = modulus_p(a, grid, measure, p).value;
    const double mb = modulus_p(b, grid, measure, p).value;
    const double mab = modulus_p(both, grid, measure, p).value;
    CHECK(ma <= mab + 2 * tol * mab);
    CHECK(mab <= ma + mb + 3 * tol * mab);
  }
}

TEST_CASE("disjoint families add") {
  const auto grid = unit_grid(8);
  const std::vector<Polyline> left{Polyline({{0.05, 0.1}, {0.4, 0.3}}), Polyline({{0.1, 0.4}, {0.45, 0.2}})};
  const std::vector<Polyline> right{Polyline({{0.55, 0.6}, {0.95, 0.9}}), Polyline({{0.6, 0.95}, {0.9, 0.55}})};
  for (double p : {1.5, 2.0, 3.0}) {
    auto both = left;
    both.insert(both.end(), right.begin(), right.end());
    const double sum = modulus_p(left, grid, PathMeasure::arc_length(), p, tight()).value +
                       modulus_p(right, grid, PathMeasure::arc_length(), p, tight()).value;
    CHECK(modulus_p(both, grid, PathMeasure::arc_length(), p, tight()).value == doctest::Approx(sum).epsilon(1e-5));
  }
}

TEST_CASE("paths containing admissible subpaths") {
  gen::Rng rng(32);
  const auto grid = unit_grid(8);
  for (int trial = 0; trial < 10; ++trial) {
    const auto inner = random_family(rng, 3);
    std::vector<Polyline> outer;
    for (const auto& path : inner) {
      auto v = path.vertices();
      v.insert(v.begin(), Point{std::max(0.0, v.front()[0] - 0.005), v.front()[1]});
      outer.emplace_back(v);
    }
    const double a = modulus_p(inner, grid, PathMeasure::arc_length(), 2.0).value;
    const double b = modulus_p(outer, grid, PathMeasure::arc_length(), 2.0).value;
    CHECK(b <= a + tol * a);
  }
}

TEST_CASE("scaling the path measure") {
  gen::Rng rng(33);
  const auto grid = unit_grid(6);
  const auto family = random_family(rng, 5);
  for (double p : {1.5, 2.5}) {
    const double base = modulus_p(family, grid, PathMeasure::arc_length(), p, tight()).value;
    for (double s : {0.5, 3.0}) {
      const double scaled = modulus_p(family, grid, PathMeasure::arc_length().scaled(s), p, tight()).value;
      CHECK(scaled == doctest::Approx(base * std::pow(s, -p)).epsilon(1e-5));
    }
  }
}

TEST_CASE("paths with no incidence give infinite modulus") {
  const auto grid = unit_grid(2);
  const std::vector<Polyline> family{Polyline({{0.1, 0.1}, {0.4, 0.4}}), Polyline({{0.6, 0.2}, {0.9, 0.2}})};
  const auto r = modulus_p(family, grid, PathMeasure::parabolic_height(), 2.0);
  CHECK(r.value == std::numeric_limits<double>::infinity());
  REQUIRE(r.offending_path.has_value());
  CHECK(*r.offending_path == 1);
}

TEST_CASE("witness bounds") {
  const auto grid = unit_grid(4);
  const std::vector<Polyline> family{Polyline({{0.1, 0.1}, {0.9, 0.3}}), Polyline({{0.1, 0.8}, {0.7, 0.2}})};
  const auto r = modulus_p(family, grid, PathMeasure::arc_length(), 2.0, tight());
  const double bound = modulus_bound_from_witness(r.extremal_g, family, grid, PathMeasure::arc_length(), 1.0 - 1e-9,
                                                  2.0, r.value);
  CHECK(bound == doctest::Approx(r.value).epsilon(1e-6));

  std::vector<double> doubled(r.extremal_g);
  for (double& g : doubled) g *= 2.0;
  CHECK(modulus_bound_from_witness(doubled, family, grid, PathMeasure::arc_length(), 2.0 - 2e-9, 2.0) ==
        doctest::Approx(bound).epsilon(1e-12));

  try {
    modulus_bound_from_witness(r.extremal_g, family, grid, PathMeasure::arc_length(), 2.0, 2.0);
    FAIL("expected witness_invalid");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::witness_invalid);
    CHECK(std::string(e.what()).find("path") != std::string::npos);
  }
}

TEST_CASE("a null cell drives the witness bound to zero") {
  // every path runs through the first column, whose measure is negligible
  auto base = GroundGrid::uniform({0, 0}, {1, 1}, {4, 1}, MetricDescriptor::euclidean(2));
  const std::vector<Polyline> family{Polyline({{0.05, 0.2}, {0.2, 0.2}}), Polyline({{0.1, 0.9}, {0.2, 0.5}})};
  std::vector<double> m = base.measures();
  double least = std::numeric_limits<double>::infinity();
  for (const auto& path : family)
    least = std::min(least, incidence(path, base, PathMeasure::arc_length()).dot(std::vector<double>{1, 0, 0, 0}));
  double prev = std::numeric_limits<double>::infinity();
  for (double null_mass : {1e-4, 1e-8, 1e-12}) {
    m[0] = null_mass;
    const auto grid = base.with_measures(m);
    for (double scale : {1.0, 1e3, 1e6}) {
      std::vector<double> g(grid.size(), 0.0);
      g[0] = scale;
      const double bound = modulus_bound_from_witness(g, family, grid, PathMeasure::arc_length(), scale * least, 2.0);
      CHECK(bound == doctest::Approx(null_mass / (least * least)).epsilon(1e-9));
      CHECK(bound < prev * (1 + 1e-9));
      prev = bound;
    }
  }
  CHECK(prev < 1e-9);
  // a true zero-measure cell makes the family free
  m[0] = 0.0;
  CHECK(modulus_p(family, base.with_measures(m), PathMeasure::arc_length(), 2.0).value == 0.0);
}
