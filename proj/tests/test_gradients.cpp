#include <cmath>
#include <memory>
#include <vector>

#include "doctest.h"
#include "nsob/conditions.hpp"
#include "nsob/error.hpp"
#include "nsob/families.hpp"
#include "nsob/gradients.hpp"
#include "nsob/parametrize.hpp"
#include "nsob/sobolev.hpp"
#include "support/generators.hpp"

using namespace nsob;

namespace {

const ScalarField height([](std::span<const double> x) { return x[1]; });

}  // namespace

TEST_CASE("verify upper gradient examples") {
  const auto family = generate_slope_family(1.0, {{0, 0}, {1, 1}}, 20, 3);
  const auto measure = PathMeasure::parabolic_height();
  CHECK(verify_upper_gradient(ScalarField::constant(2.0), ScalarField::constant(0.0), family, measure).passed());

  for (double k : {0.5, 1.0, 2.0}) {
    const auto fam = generate_slope_family(k, {{0, 0}, {1, 1}}, 20, 4);
    const auto loose = verify_upper_gradient(height, ScalarField::constant(std::sqrt(1 + k * k) / k), fam, measure);
    CHECK(loose.passed());
    CHECK(loose.checked_count == fam.size() * 9);
    // the height measure makes |dy| itself the mass, so 1 is already sharp
    CHECK(verify_upper_gradient(height, ScalarField::constant(1.0), fam, measure).passed());
  }

  const double delta = 0.1;
  const Polyline seg({{0.1, 0.2}, {0.5, 0.6}});
  const auto r = verify_upper_gradient(height, ScalarField::constant(1.0 - delta), {seg}, measure);
  CHECK_FALSE(r.passed());
  REQUIRE(!r.violations.empty());
  CHECK(r.violations.front().kind == CheckKind::whole_path);
  CHECK(r.violations.front().slack == doctest::Approx(-delta * 0.4).epsilon(1e-9));
  CHECK(r.max_relative_violation == doctest::Approx(delta).epsilon(1e-9));
  CHECK(r.violations.size() == 9);
}

TEST_CASE("evaluation failures mark paths unverifiable") {
  const ScalarField bad([](std::span<const double> x) { return x[0] > 0.5 ? std::nan("") : 0.0; });
  const std::vector<Polyline> family{Polyline({{0.1, 0.1}, {0.3, 0.3}}), Polyline({{0.6, 0.1}, {0.9, 0.3}})};
  const auto r = verify_upper_gradient(bad, ScalarField::constant(1.0), family, PathMeasure::arc_length());
  CHECK(r.violations.empty());
  REQUIRE(r.unverifiable.size() == 1);
  CHECK(r.unverifiable[0] == 1);
}

TEST_CASE("upper gradients pass on dyadic subpaths") {
  gen::Rng rng(41);
  const ScalarField f([](std::span<const double> x) { return std::sin(2 * x[0]) + x[1] * x[1]; });
  const ScalarField rho([](std::span<const double> x) { return 2.0 + 2 * x[1]; });
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<Polyline> family;
    for (int i = 0; i < 5; ++i) family.push_back(rng.monotone_path({0, 0}, {1, 1}, 4));
    REQUIRE(verify_upper_gradient(f, rho, family, PathMeasure::arc_length()).passed());
    std::vector<Polyline> pieces;
    for (const auto& path : family)
      for (auto& q : dyadic_subpaths(path)) pieces.push_back(std::move(q));
    CHECK(verify_upper_gradient(f, rho, pieces, PathMeasure::arc_length()).passed());
  }
}

TEST_CASE("minimal upper gradient examples") {
  const auto grid = GroundGrid::uniform({0, 0}, {1, 1}, {1, 1}, MetricDescriptor::euclidean(2));
  const Polyline seg({{0.1, 0.5}, {0.6, 0.5}});
  const auto flat = minimal_upper_gradient(ScalarField::constant(1.0), {seg}, grid, PathMeasure::arc_length(), 2.0);
  CHECK(flat.value == 0.0);

  const double L = 0.5;
  const ScalarField ramp([&](std::span<const double> x) { return x[0] / L; });
  const auto sol = minimal_upper_gradient(ramp, {seg}, grid, PathMeasure::arc_length(), 2.0);
  CHECK(sol.g[0] == doctest::Approx(1.0 / L).epsilon(1e-6));
  CHECK(sol.value == doctest::Approx(1.0 / (L * L)).epsilon(1e-6));

  const auto g8 = GroundGrid::uniform({0, 0}, {1, 1}, {8, 8}, MetricDescriptor::euclidean(2));
  for (double k : {0.5, 1.0, 2.0}) {
    const auto family = generate_slope_family(k, {{0, 0}, {1, 1}}, 15, 5);
    const auto best = minimal_upper_gradient(height, family, g8, PathMeasure::parabolic_height(), 2.0);
    // rho = 1 is verified above, so the optimum sits below its norm
    CHECK(best.value <= g8.total_measure() * (1 + 1e-6));
  }
}

TEST_CASE("weak gradient repair") {
  const std::vector<double> rho{1.0, 0.5, 0.0, 2.0};
  const std::vector<double> m{0.5, 1.0, 2.0, 0.25};
  const std::vector<double> zero(4, 0.0);
  CHECK(repair_weak_gradient(rho, zero, 0.1, 2.0, m) == rho);

  auto with_norm = [&](double target, double p) {
    std::vector<double> g{1.0, 2.0, 0.5, 3.0};
    const double n = lp_norm(g, m, p);
    for (double& v : g) v *= target / n;
    return g;
  };
  for (double p : {1.5, 2.0, 3.0}) {
    const auto unit = with_norm(1.0, p);
    auto out = repair_weak_gradient(rho, unit, 0.2, p, m);
    std::vector<double> diff(4);
    for (std::size_t i = 0; i < 4; ++i) {
      CHECK(out[i] >= rho[i]);
      diff[i] = out[i] - rho[i];
    }
    CHECK(lp_norm(diff, m, p) == doctest::Approx(0.1).epsilon(1e-12));

    const auto three = with_norm(3.0, p);
    out = repair_weak_gradient(rho, three, 0.1, p, m);
    for (std::size_t i = 0; i < 4; ++i) diff[i] = out[i] - rho[i];
    CHECK(lp_norm(diff, m, p) == doctest::Approx(0.075).epsilon(1e-12));
  }
  const std::vector<double> inf{std::numeric_limits<double>::infinity(), 0, 0, 0};
  CHECK_THROWS_AS(repair_weak_gradient(rho, inf, 0.1, 2.0, m), Error);
  CHECK_THROWS_AS(repair_weak_gradient(rho, zero, 0.0, 2.0, m), Error);
}

TEST_CASE("absolute continuity along parametrized paths") {
  const auto measure = PathMeasure::weighted([](std::span<const double> x) { return 1.0 / x[0]; });
  const ParametrizedPath path(Polyline(std::vector<Point>{{1.0}, {2.0}}), measure);
  const auto flat = acc_check(ScalarField::constant(3.0), path, ScalarField::constant(1.0));
  CHECK(flat.passed());
  CHECK(flat.checked_count >= 200);

  // f o gamma_h is the identity on [0, h]: every check is an equality
  const ScalarField log_x([](std::span<const double> x) { return std::log(x[0]); });
  const auto exact = acc_check(log_x, path, ScalarField::constant(1.0));
  CHECK(exact.passed());
  CHECK(std::abs(exact.min_slack) <= 1e-7);

  const ScalarField jump([](std::span<const double> x) { return x[0] > 1.5 ? 1.0 : 0.0; });
  const auto broken = acc_check(jump, path, ScalarField::constant(1.0));
  CHECK_FALSE(broken.passed());
  CHECK_FALSE(broken.violations.empty());
}

TEST_CASE("hajlasz verification") {
  gen::Rng rng(42);
  const auto metric = MetricDescriptor::euclidean(2);
  std::vector<std::pair<Point, Point>> pairs;
  for (int i = 0; i < 10000; ++i) pairs.emplace_back(rng.point({-1, -1}, {1, 1}), rng.point({-1, -1}, {1, 1}));

  for (double beta : {0.3, 0.7, 1.0}) {
    const Point x0{0.2, -0.1};
    const ScalarField dist([&, beta](std::span<const double> x) { return std::pow(distance(x, x0, metric), beta); });
    CHECK(hajlasz_verify(dist, ScalarField::constant(0.5), beta, pairs, metric).passed());

    const double L = 3.0;
    const ScalarField holder([&, beta](std::span<const double> x) {
      return L * std::pow(std::abs(x[0] - x0[0]), beta);
    });
    CHECK(hajlasz_verify(holder, ScalarField::constant(L / 2), beta, pairs, metric).passed());
  }
  const auto r = hajlasz_verify(ScalarField([](std::span<const double> x) { return x[0]; }),
                                ScalarField::constant(0.0), 1.0, pairs, metric);
  CHECK(r.violations.size() == pairs.size());
}

TEST_CASE("minimal hajlasz gradients") {
  const auto metric = MetricDescriptor::euclidean(1);
  const std::vector<Point> pts{{0.0}, {1.0}, {2.5}};
  const std::vector<double> m{1.0, 1.0, 1.0};
  const std::vector<double> flat{2.0, 2.0, 2.0};
  const auto zero = hajlasz_minimal(flat, pts, 1.0, 2.0, m, metric);
  CHECK(zero.value == 0.0);

  const std::vector<Point> two{{0.0}, {2.0}};
  const std::vector<double> f2{0.0, 2.0};
  const std::vector<double> m2{1.0, 1.0};
  const auto sol = hajlasz_minimal(f2, two, 1.0, 2.0, m2, metric);
  CHECK(sol.g[0] == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(sol.g[1] == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(sol.value == doctest::Approx(0.5).epsilon(1e-6));

  const std::vector<Point> same{{0.5}, {0.5}};
  try {
    hajlasz_minimal(f2, same, 1.0, 2.0, m2, metric);
    FAIL("expected infeasible");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::infeasible);
  }
}

TEST_CASE("pointwise hajlasz bound yields a path upper gradient") {
  gen::Rng rng(43);
  const auto metric = MetricDescriptor::euclidean(2);
  const ScalarField f([](std::span<const double> x) { return 0.3 * x[0] + 0.4 * x[1] + 0.1 * std::sin(x[0]); });
  const double G = 0.5 * (0.5 + 0.1);  // half a Lipschitz bound
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<Polyline> family;
    for (int i = 0; i < 6; ++i) family.push_back(rng.monotone_path({0, 0}, {1, 1}, 4));
    std::vector<std::pair<Point, Point>> pairs;
    for (const auto& path : family)
      for (int i = 0; i < 200; ++i) pairs.emplace_back(path.at(rng.uniform(0, 1)), path.at(rng.uniform(0, 1)));
    REQUIRE(hajlasz_verify(f, ScalarField::constant(G), 1.0, pairs, metric).passed());
    const double chord = arc_chord_constant(family, PathMeasure::arc_length(), 1.0, metric).best_constant;
    CHECK(verify_upper_gradient(f, ScalarField::constant(4 * chord * G), family, PathMeasure::arc_length()).passed());
  }
}
