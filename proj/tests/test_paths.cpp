#include <cmath>
#include <memory>

#include "doctest.h"
#include "nsob/error.hpp"
#include "nsob/families.hpp"
#include "nsob/incidence.hpp"
#include "nsob/parametrize.hpp"
#include "nsob/path_measure.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace nsob;

namespace {

PathMeasure inverse_x() {
  return PathMeasure::weighted([](std::span<const double> x) { return 1.0 / x[0]; });
}

Polyline line(Point a, Point b) { return Polyline({std::move(a), std::move(b)}); }

}  // namespace

TEST_CASE("mu length examples") {
  CHECK(mu_length(line({0, 0}, {2, 2}), PathMeasure::parabolic_height()) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(mu_length(line({0, 1}, {3, 1}), PathMeasure::parabolic_height()) == 0.0);
  const double ln2 = mu_length(line({1}, {2}), inverse_x());
  CHECK(std::abs(ln2 - std::log(2.0)) <= 1e-8 * std::log(2.0));
  CHECK(std::abs(ln2 - oracle::simpson([](double x) { return 1.0 / x; }, 1, 2)) <= 1e-8);
  CHECK(mu_length(line({0, 0}, {3, 4}), PathMeasure::arc_length().scaled(2.0)) == doctest::Approx(10.0));
  CHECK_THROWS_AS(mu_length(line({-1}, {1}), PathMeasure::weighted([](std::span<const double> x) {
                    return x[0] == 0.0 ? std::nan("") : 1.0 / x[0];
                  })),
                  Error);
}

TEST_CASE("nu at examples") {
  const auto seg = line({0, 0}, {1, 0});
  CHECK(nu_at(seg, PathMeasure::arc_length(), 0.0) == 0.0);
  CHECK(nu_at(seg, PathMeasure::arc_length(), 0.5) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(nu_at(line({1}, {2}), inverse_x(), 0.5) == doctest::Approx(std::log(1.5)).epsilon(1e-8));
  CHECK_THROWS_AS(nu_at(seg, PathMeasure::arc_length(), 1.5), Error);
  CHECK_THROWS_AS(nu_at(seg, PathMeasure::arc_length(), -0.1), Error);
}

TEST_CASE("parametrize examples") {
  const ParametrizedPath unit(line({0, 0}, {3, 4}), PathMeasure::arc_length());
  CHECK(unit.h() == doctest::Approx(5.0));
  for (double s : {0.0, 1.0, 2.5, 5.0}) {
    const Point x = unit.at(s);
    CHECK(x[0] == doctest::Approx(0.6 * s));
    CHECK(x[1] == doctest::Approx(0.8 * s));
  }

  const ParametrizedPath diag(line({0, 0}, {1, 1}), PathMeasure::parabolic_height());
  CHECK(diag.h() == doctest::Approx(1.0).epsilon(1e-14));
  for (int i = 0; i <= 20; ++i) {
    const double s = i / 20.0;
    const Point x = diag.at(s);
    CHECK(std::abs(x[0] - s) <= 1e-10);
    CHECK(std::abs(x[1] - s) <= 1e-10);
  }

  CHECK_THROWS_AS(ParametrizedPath(line({0, 0}, {1, 0}), PathMeasure::parabolic_height()), Error);
  // one horizontal leg inside an otherwise rising path is still degenerate
  CHECK_THROWS_AS(validate_gamma_mu(Polyline({{0, 0}, {1, 1}, {2, 1}}), PathMeasure::parabolic_height()), Error);
  CHECK_NOTHROW(validate_gamma_mu(Polyline({{0, 0}, {1, 1}, {2, 0}}), PathMeasure::parabolic_height()));
}

TEST_CASE("parametrized paths have unit mu speed") {
  gen::Rng rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const auto path = rng.monotone_path({1, 1}, {3, 3}, 5);
    const auto measure = PathMeasure::weighted([](std::span<const double> x) { return 1.0 + x[0] * x[1]; });
    const ParametrizedPath pp(path, measure);
    for (int i = 0; i <= 100; ++i) {
      const double s = pp.h() * i / 100.0;
      const double t = pp.parameter_at(s);
      CHECK(std::abs(pp.nu(t) - s) <= 1e-8 * std::max(1.0, pp.h()));
    }
  }
}

TEST_CASE("nu is strictly increasing on valid paths") {
  gen::Rng rng(12);
  for (int trial = 0; trial < 10; ++trial) {
    const auto path = rng.monotone_path({0.5, 0.5}, {2, 2}, 6);
    const auto measure = inverse_x();
    double prev = -1.0;
    for (int i = 0; i <= 100; ++i) {
      const double v = nu_at(path, measure, i / 100.0);
      CHECK(v > prev + (i == 0 ? 0.0 : 1e-12));
      prev = v;
    }
  }
}

TEST_CASE("subpath examples and additivity") {
  const auto seg = line({0, 0}, {1, 0});
  const auto whole = subpath(seg, 0.0, 1.0);
  CHECK(whole.vertices() == seg.vertices());
  CHECK(subpath(seg, 0.0, 0.5).length() + subpath(seg, 0.5, 1.0).length() == doctest::Approx(1.0).epsilon(1e-15));

  const auto real = line({1}, {2});
  const double h = mu_length(real, inverse_x());
  const double left = mu_length(subpath(real, 0.0, 0.3), inverse_x());
  const double right = mu_length(subpath(real, 0.3, 1.0), inverse_x());
  CHECK(std::abs(left + right - h) <= 1e-9 * h);
  CHECK_THROWS_AS(subpath(seg, 0.5, 0.5), Error);
  CHECK_THROWS_AS(subpath(seg, 0.7, 0.2), Error);

  gen::Rng rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    const auto path = rng.monotone_path({1, 1}, {2, 2}, 7);
    const double x = rng.uniform(0.05, 0.95);
    const double a = mu_length(subpath(path, 0.0, x), inverse_x());
    const double b = mu_length(subpath(path, x, 1.0), inverse_x());
    const double total = mu_length(path, inverse_x());
    CHECK(std::abs(a + b - total) <= 1e-9 * total);
  }
}

TEST_CASE("dyadic subpaths tile the parameter domain") {
  const Polyline p({{0, 0}, {1, 2}, {3, 1}});
  const auto pieces = dyadic_subpaths(p);
  REQUIRE(pieces.size() == 8);
  double total = 0.0;
  for (const auto& q : pieces) total += q.length();
  CHECK(total == doctest::Approx(p.length()));
  CHECK(pieces.front().front() == p.front());
  CHECK(pieces.back().back() == p.back());
}

TEST_CASE("path integral examples") {
  const auto real = line({1}, {2});
  const double h = mu_length(real, inverse_x());
  CHECK(path_integral(ScalarField::constant(1.0), real, inverse_x()) == doctest::Approx(h).epsilon(1e-12));

  // first half by mass ends at sqrt 2; a grid with an edge there makes the
  // indicator exact
  auto grid = std::make_shared<const GroundGrid>(std::vector<std::vector<double>>{{1.0, std::sqrt(2.0), 2.0}},
                                                 MetricDescriptor::euclidean(1));
  const ScalarField first_half(GridFunction(grid, {1.0, 0.0}));
  CHECK(std::abs(path_integral(first_half, real, inverse_x()) - h / 2) <= 1e-8 * h);

  const auto sq = ScalarField([](std::span<const double> x) { return x[0] * x[0]; });
  CHECK(path_integral(sq, real, inverse_x()) == doctest::Approx(1.5).epsilon(1e-8));
}

TEST_CASE("change of variables against the mu parametrization") {
  gen::Rng rng(14);
  const Box region{{0, 0}, {1, 1}};
  const auto family = generate_slope_family(1.5, region, 4, 99);
  const auto measure = PathMeasure::parabolic_height();
  for (const auto& path : family) {
    const ParametrizedPath pp(path, measure);
    for (int k = 0; k < 5; ++k) {
      const double a = rng.uniform(0, 1), b = rng.uniform(0, 1), c = rng.uniform(0, 1), d = rng.uniform(0, 2);
      const ScalarField g([=](std::span<const double> x) {
        return a + b * x[0] * x[0] + c * x[0] * x[1] + d * std::pow(x[1], 3);
      });
      const double lhs = path_integral(g, path, measure);
      const double rhs = pp.integrate(g);
      CHECK(std::abs(lhs - rhs) <= 1e-7 * (1.0 + lhs));
    }
  }
}

TEST_CASE("weighted correspondence of path integrals") {
  gen::Rng rng(15);
  const FieldFn omega = [](std::span<const double> x) { return 2.0 + std::sin(3 * x[0]) * std::cos(x[1]); };
  const auto weighted = PathMeasure::weighted(omega);
  for (int trial = 0; trial < 10; ++trial) {
    const auto path = rng.monotone_path({0, 0}, {2, 2}, 5);
    const ScalarField g([](std::span<const double> x) { return 1.0 + x[0] * x[1]; });
    const ScalarField g_over([&](std::span<const double> x) { return (1.0 + x[0] * x[1]) / omega(x); });
    CHECK(std::abs(path_integral(g_over, path, weighted) - path_integral(g, path, PathMeasure::arc_length())) <= 1e-7);
  }
}

TEST_CASE("incidence examples") {
  const auto grid1 = GroundGrid::uniform({0, 0}, {1, 1}, {1, 1}, MetricDescriptor::euclidean(2));
  const auto inside = line({0.2, 0.2}, {0.7, 0.9});
  const auto row1 = incidence(inside, grid1, PathMeasure::arc_length());
  REQUIRE(row1.size() == 1);
  CHECK(row1.weight[0] == doctest::Approx(inside.length()));

  const auto grid2 = GroundGrid::uniform({0}, {1}, {2}, MetricDescriptor::euclidean(1));
  const auto row2 = incidence(line({0}, {1}), grid2, PathMeasure::arc_length());
  REQUIRE(row2.size() == 2);
  CHECK(row2.weight[0] == doctest::Approx(0.5));
  CHECK(row2.weight[1] == doctest::Approx(0.5));

  const auto grid3 = GroundGrid::uniform({1}, {2}, {2}, MetricDescriptor::euclidean(1));
  const auto row3 = incidence(line({1}, {2}), grid3, inverse_x());
  REQUIRE(row3.size() == 2);
  CHECK(std::abs(row3.weight[0] - std::log(1.5)) <= 1e-9);
  CHECK(std::abs(row3.weight[1] - std::log(4.0 / 3.0)) <= 1e-9);

  try {
    incidence(line({0.5, 0.5}, {1.5, 0.5}), grid1, PathMeasure::arc_length());
    FAIL("expected out_of_domain");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::out_of_domain);
  }
}

TEST_CASE("incidence rows conserve mass") {
  gen::Rng rng(16);
  const auto grid = GroundGrid::uniform({0, 0}, {2, 2}, {7, 5}, MetricDescriptor::euclidean(2));
  const auto measures = {PathMeasure::arc_length(), PathMeasure::parabolic_height(),
                         PathMeasure::weighted([](std::span<const double> x) { return 1.0 + x[0]; })};
  for (const auto& measure : measures) {
    for (int trial = 0; trial < 100; ++trial) {
      const auto path = rng.monotone_path({0, 0}, {2, 2}, 4);
      const auto row = incidence(path, grid, measure);
      const double h = mu_length(path, measure);
      CHECK(std::abs(row.sum() - h) <= 1e-8 * std::max(h, 1e-300));
      for (double w : row.weight) CHECK(w >= 0.0);
    }
  }
}

TEST_CASE("slope families") {
  const Box region{{0, 0}, {4, 2}};
  const auto tent = connect_with_slope({0, 0.5}, {2, 0.5}, 1.0, region);
  REQUIRE(tent.segment_count() == 2);
  CHECK(tent.vertices()[1][0] == doctest::Approx(1.0));
  CHECK(tent.vertices()[1][1] == doctest::Approx(1.5));

  for (double k : {0.5, 1.0, 2.0}) {
    const auto family = generate_slope_family(k, {{0, 0}, {1, 1}}, 30, 7);
    REQUIRE(family.size() == 30);
    for (const auto& path : family) {
      double horizontal = 0.0;
      for (std::size_t s = 0; s < path.segment_count(); ++s) {
        const auto& a = path.vertices()[s];
        const auto& b = path.vertices()[s + 1];
        CHECK(std::abs(std::abs(b[1] - a[1]) / std::abs(b[0] - a[0]) - k) <= 1e-9 * k);
        horizontal += std::abs(b[0] - a[0]);
      }
      CHECK(mu_length(path, PathMeasure::parabolic_height()) == doctest::Approx(k * horizontal).epsilon(1e-10));
      CHECK_NOTHROW(validate_gamma_mu(path, PathMeasure::parabolic_height()));
    }
  }
  CHECK_THROWS_AS(generate_slope_family(1.0, {{0, 0}, {1, 0}}, 3, 1), Error);
  CHECK_THROWS_AS(connect_with_slope({0, 0}, {1, 2}, 1.0, region), Error);
}

TEST_CASE("polyline validation") {
  CHECK_THROWS_AS(Polyline({{0, 0}}), Error);
  CHECK_THROWS_AS(Polyline({{0, 0}, {0, 0}}), Error);
  CHECK_THROWS_AS(Polyline({{0, 0}, {2, 0}, {1, 1}, {1, -1}}), Error);
  CHECK_THROWS_AS(Polyline({{0, 0}, {1, 0}, {0.5, 0}}), Error);
  CHECK_NOTHROW(Polyline({{0, 0}, {1, 0}, {1, 1}, {0, 1}}));
}

TEST_CASE("tabulated density measure") {
  const auto measure = PathMeasure::density({0.0, 1.0}, {1.0, 3.0});
  const auto seg = line({0, 0}, {1, 0});
  CHECK(mu_length(seg, measure) == doctest::Approx(2.0).epsilon(1e-9));
  // a subpath keeps its arc position along the parent
  CHECK(mu_length(subpath(seg, 0.5, 1.0), measure) == doctest::Approx(1.25).epsilon(1e-9));
}
