#include "nsob/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "nsob/error.hpp"
#include "nsob/parallel.hpp"
#include "nsob/sobolev.hpp"

namespace nsob {

double Cube::volume() const {
  return std::pow(2.0 * half_side, static_cast<double>(center.size()));
}

namespace {

void check_cube(const Cube& c) {
  if (c.center.empty()) fail(ErrorKind::invalid_input, "cube has no dimension");
  if (!(c.half_side > 0.0) || !std::isfinite(c.half_side))
    fail(ErrorKind::invalid_input, "cube half side must be positive");
}

double cube_integral(const FieldFn& fn, const Cube& c, const BoxQuadratureOptions& options) {
  Point lo(c.center.size()), hi(c.center.size());
  for (std::size_t k = 0; k < lo.size(); ++k) {
    lo[k] = c.center[k] - c.half_side;
    hi[k] = c.center[k] + c.half_side;
  }
  return integrate_box(fn, lo, hi, options);
}

// Fill best constant and witness from per-sample ratios; NaN marks a skip.
template <typename W>
void finish(ConditionReport& report, const std::vector<W>& witnesses) {
  bool any = false;
  for (std::size_t i = 0; i < report.ratios.size(); ++i) {
    const double r = report.ratios[i];
    if (std::isnan(r)) {
      ++report.skipped;
      continue;
    }
    ++report.samples_checked;
    if (!any || r > report.best_constant) {
      report.best_constant = r;
      report.witness = witnesses[i];
      any = true;
    }
  }
}

}  // namespace

PoincareTerms poincare_terms(const GridFunction& f, const GridFunction& rho, const Ball& ball,
                             double beta, double lambda_dilation, double p,
                             AveragingConvention convention) {
  const GroundGrid& grid = f.grid();
  PoincareTerms t;
  double mB = 0.0, sB = 0.0;
  const auto inner = ball_cells(grid, ball.center, ball.radius);
  for (std::size_t c : inner) {
    mB += grid.cell(c).measure;
    sB += grid.cell(c).measure * f[c];
  }
  if (!(mB > 0.0)) {
    t.empty = true;
    return t;
  }
  const double fB = sB / mB;
  double dev = 0.0;
  for (std::size_t c : inner) dev += grid.cell(c).measure * std::abs(f[c] - fB);
  t.lhs = dev / mB;

  double mL = 0.0, sL = 0.0;
  for (std::size_t c : ball_cells(grid, ball.center, lambda_dilation * ball.radius)) {
    mL += grid.cell(c).measure;
    if (rho[c] != 0.0) sL += grid.cell(c).measure * std::pow(std::abs(rho[c]), p);
  }
  const double energy = convention == AveragingConvention::standard ? (mL > 0.0 ? sL / mL : 0.0) : sL;
  t.rhs = std::pow(2.0 * ball.radius, beta) * std::pow(energy, 1.0 / p);
  return t;
}

double arc_chord_ratio(const Polyline& path, const PathMeasure& measure, double beta,
                       const MetricDescriptor& metric) {
  const double mu = mu_length(path, measure);
  if (!(mu > 0.0)) fail(ErrorKind::gamma_mu_violation, "path with zero mu-length");
  return std::pow(diameter(path.vertices(), metric), beta) / mu;
}

double apq_ratio(const FieldFn& w1, const FieldFn& w2, double p, double q, double alpha, const Cube& cube,
                 AveragingConvention convention, const BoxQuadratureOptions& options) {
  check_cube(cube);
  const double pc = p / (p - 1.0);
  const double e1 = -pc / p;
  double I1 = cube_integral([&](std::span<const double> x) { return std::pow(w1(x), e1); }, cube, options);
  double I2 = cube_integral(w2, cube, options);
  const double vol = cube.volume();
  if (convention == AveragingConvention::alternate) {
    I1 /= vol;
    I2 /= vol;
  }
  return std::pow(I1, 1.0 / pc) * std::pow(I2, 1.0 / q) / std::pow(vol, 1.0 - alpha);
}

double apq_frozen_ratio(const FieldFn& w1, const FieldFn& w2, double p, double q, double alpha,
                        const Cube& cube) {
  check_cube(cube);
  const double pc = p / (p - 1.0);
  const double vol = cube.volume();
  const double I1 = std::pow(w1(cube.center), -pc / p) * vol;
  const double I2 = w2(cube.center) * vol;
  return std::pow(I1, 1.0 / pc) * std::pow(I2, 1.0 / q) / std::pow(vol, 1.0 - alpha);
}

double growth_ratio(const FieldFn& omega, double p, double q, double n, const Cube& cube,
                    AveragingConvention convention, const BoxQuadratureOptions& options) {
  check_cube(cube);
  double I = cube_integral([&](std::span<const double> x) { return std::pow(omega(x), p); }, cube, options);
  const double vol = cube.volume();
  if (convention == AveragingConvention::alternate) I /= vol;
  return I / std::pow(vol, q * (1.0 / p - 1.0 / n));
}

ConditionReport poincare_constant(const GridFunction& f, const GridFunction& rho,
                                  const std::vector<Ball>& balls, double beta, double lambda_dilation,
                                  double p, AveragingConvention convention) {
  if (!(lambda_dilation >= 1.0)) fail(ErrorKind::invalid_input, "dilation factor must be >= 1");
  if (!(p >= 1.0)) fail(ErrorKind::invalid_input, "p must be >= 1");
  if (!(beta > 0.0)) fail(ErrorKind::invalid_input, "beta must be positive");
  if (f.size() != rho.size()) fail(ErrorKind::dimension_mismatch, "f and rho live on different grids");
  ConditionReport report;
  report.parameters = {{"p", p}, {"beta", beta}, {"lambda", lambda_dilation}};
  report.ratios.assign(balls.size(), std::numeric_limits<double>::quiet_NaN());
  std::vector<char> hard(balls.size(), 0);
  parallel_for(balls.size(), [&](std::size_t i) {
    const auto t = poincare_terms(f, rho, balls[i], beta, lambda_dilation, p, convention);
    if (t.empty) return;
    if (t.rhs > 0.0) report.ratios[i] = t.lhs / t.rhs;
    else if (t.lhs > 0.0) hard[i] = 1;
    else report.ratios[i] = 0.0;
  });
  for (char h : hard) report.hard_violations += static_cast<std::size_t>(h);
  finish(report, balls);
  report.skipped -= report.hard_violations;
  return report;
}

ConditionReport arc_chord_constant(const std::vector<Polyline>& family, const PathMeasure& measure,
                                   double beta, const MetricDescriptor& metric) {
  if (!(beta > 0.0)) fail(ErrorKind::invalid_input, "beta must be positive");
  ConditionReport report;
  report.parameters = {{"beta", beta}};
  std::vector<std::vector<double>> per_path(family.size());
  parallel_for(family.size(), [&](std::size_t i) {
    auto& r = per_path[i];
    r.push_back(arc_chord_ratio(family[i], measure, beta, metric));
    for (const auto& piece : dyadic_subpaths(family[i])) r.push_back(arc_chord_ratio(piece, measure, beta, metric));
  });
  std::vector<PathWitness> witnesses;
  for (std::size_t i = 0; i < family.size(); ++i) {
    for (std::size_t j = 0; j < per_path[i].size(); ++j) {
      report.ratios.push_back(per_path[i][j]);
      witnesses.push_back({i, static_cast<int>(j) - 1});
    }
  }
  finish(report, witnesses);
  return report;
}

namespace {

template <typename Ratio>
ConditionReport cube_report(const std::vector<Cube>& cubes, Ratio ratio) {
  ConditionReport report;
  report.ratios.assign(cubes.size(), std::numeric_limits<double>::quiet_NaN());
  parallel_for(cubes.size(), [&](std::size_t i) {
    try {
      const double r = ratio(cubes[i]);
      if (std::isfinite(r)) report.ratios[i] = r;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::evaluation) throw;
    }
  });
  finish(report, cubes);
  return report;
}

}  // namespace

ConditionReport apq_check(const FieldFn& w1, const FieldFn& w2, double p, double q, double alpha,
                          const std::vector<Cube>& cubes, AveragingConvention convention) {
  if (!(p > 1.0 && std::isfinite(p)) || !(q > 1.0 && std::isfinite(q)))
    fail(ErrorKind::parameter_range, fmt::format("need 1 < p, q < inf (p = {}, q = {})", p, q));
  if (!(alpha >= 0.0 && alpha < 1.0)) fail(ErrorKind::parameter_range, "need 0 <= alpha < 1");
  if (1.0 / p - alpha > 1.0 / q + 1e-15) fail(ErrorKind::parameter_range, "need 1/p - alpha <= 1/q");
  auto report = cube_report(cubes, [&](const Cube& c) { return apq_ratio(w1, w2, p, q, alpha, c, convention); });
  report.parameters = {{"p", p}, {"q", q}, {"alpha", alpha}};
  return report;
}

ConditionReport growth_check(const FieldFn& omega, double p, double q, double n,
                             const std::vector<Cube>& cubes, AveragingConvention convention) {
  if (!(p > 1.0) || !(q > 0.0) || !(n >= 1.0)) fail(ErrorKind::parameter_range, "need p > 1, q > 0, n >= 1");
  const double eps = 1e-15;
  if (!(1.0 / p - 1.0 / n <= 1.0 / q + eps && 1.0 / q < 1.0 / p))
    fail(ErrorKind::parameter_range, fmt::format("need 1/p - 1/n <= 1/q < 1/p (p = {}, q = {}, n = {})", p, q, n));
  auto report = cube_report(cubes, [&](const Cube& c) { return growth_ratio(omega, p, q, n, c, convention); });
  report.parameters = {{"p", p}, {"q", q}, {"n", n}};
  return report;
}

double power_weight_exponent(double n, double p, double lambda) {
  if (!(p > 1.0 && p < n)) fail(ErrorKind::parameter_range, fmt::format("need 1 < p < n (p = {}, n = {})", p, n));
  if (!(lambda >= 0.0 && lambda < 1.0)) fail(ErrorKind::parameter_range, "need 0 <= lambda < 1");
  if (!(p * lambda < n)) fail(ErrorKind::parameter_range, "need p lambda < n");
  const double q = (n - lambda * p) * p / (n - p);
  if (!(1.0 / p - 1.0 / n <= 1.0 / q + 1e-15 && 1.0 / q < 1.0 / p))
    fail(ErrorKind::parameter_range, fmt::format("exponent q = {} outside [np/(n-p), p)", q));
  return q;
}

BetaFromGrowth poincare_beta_from_growth(double delta, double q, double p, double n) {
  if (!(delta > 0.0)) fail(ErrorKind::parameter_range, "delta must be positive");
  if (!(p > 0.0) || !(q > 0.0) || !(n > 0.0)) fail(ErrorKind::parameter_range, "p, q, n must be positive");
  BetaFromGrowth out;
  out.beta = (delta * q / p) * (n / p - 1.0);
  out.degenerate = (n == p);
  return out;
}

AhlforsReport ahlfors_check(const GroundGrid& grid, double N, const std::vector<double>& radii,
                            const std::vector<Point>& centers) {
  const double diam = grid.diameter();
  for (double r : radii)
    if (!(r > 0.0 && r < 2.0 * diam)) fail(ErrorKind::invalid_input, fmt::format("radius {} outside (0, 2 diam)", r));
  AhlforsReport out;
  bool any = false;
  for (const auto& x : centers) {
    for (double r : radii) {
      double mass = 0.0;
      for (std::size_t c : ball_cells(grid, x, r)) mass += grid.cell(c).measure;
      if (!(mass > 0.0)) {
        ++out.skipped;
        continue;
      }
      ++out.samples_checked;
      const double ratio = mass / std::pow(r, N);
      if (!any || ratio < out.lower) {
        out.lower = ratio;
        out.lower_witness = {x, r};
      }
      if (!any || ratio > out.upper) {
        out.upper = ratio;
        out.upper_witness = {x, r};
      }
      any = true;
    }
  }
  return out;
}

ConditionReport embedding_holder_check(const GridFunction& f, const GridFunction& g, double beta,
                                       double N, double p,
                                       const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
  if (!(p > N / beta)) fail(ErrorKind::parameter_range, fmt::format("need p > N / beta (p = {}, N / beta = {})", p, N / beta));
  const double alpha = beta - N / p;
  const GroundGrid& grid = f.grid();
  ConditionReport report;
  std::vector<PairWitness> witnesses;
  for (const auto& [i, j] : pairs) {
    if (i >= grid.size() || j >= grid.size()) fail(ErrorKind::invalid_input, "pair index out of range");
    const double d = distance(grid.cell(i).center, grid.cell(j).center, grid.metric());
    if (d == 0.0) fail(ErrorKind::invalid_input, fmt::format("coincident pair ({}, {})", i, j));
    report.ratios.push_back(std::abs(f[i] - f[j]) / std::pow(d, alpha));
    witnesses.push_back({i, j});
  }
  finish(report, witnesses);
  const double gnorm = lp_norm(g, p);
  report.parameters = {{"alpha", alpha}, {"beta", beta}, {"N", N}, {"p", p}, {"g_norm", gnorm},
                       {"ratio_to_g_norm", gnorm > 0.0 ? report.best_constant / gnorm : INFINITY}};
  return report;
}

ConditionReport embedding_pstar_check(const GridFunction& u, const GridFunction& g, double q, double p,
                                      double N, double beta) {
  if (!(q < p && p < N * q)) fail(ErrorKind::parameter_range, fmt::format("need q < p < N q (q = {}, p = {}, N = {})", q, p, N));
  const double pstar = 1.0 / (1.0 / p - 1.0 / (N * q));
  const GroundGrid& grid = u.grid();
  double mass = 0.0, sum = 0.0;
  for (std::size_t c = 0; c < grid.size(); ++c) {
    mass += grid.cell(c).measure;
    sum += grid.cell(c).measure * u[c];
  }
  const double mean = sum / mass;
  std::vector<double> dev(u.size());
  for (std::size_t c = 0; c < dev.size(); ++c) dev[c] = u[c] - mean;
  const double lhs = lp_norm(dev, grid.measures(), pstar);
  const double rhs = std::pow(grid.diameter(), beta - 1.0 / q) * lp_norm(g, p);
  ConditionReport report;
  report.samples_checked = 1;
  if (rhs > 0.0) report.best_constant = lhs / rhs;
  else if (lhs > 0.0) report.hard_violations = 1;
  report.ratios = {report.best_constant};
  report.parameters = {{"p_star", pstar}, {"lhs", lhs}, {"rhs", rhs}, {"q", q}, {"p", p}, {"N", N}, {"beta", beta}};
  return report;
}

Point ball_extent(const MetricDescriptor& metric, double r) {
  Point e(metric.dimension(), r);
  if (metric.kind() == MetricKind::anisotropic)
    for (std::size_t k = 0; k < e.size(); ++k) e[k] = std::pow(r, metric.exponents()[k]);
  return e;
}

std::vector<Ball> ball_family(const GroundGrid& grid, const std::vector<double>& radii,
                              double lambda_dilation, std::size_t stride) {
  std::vector<Ball> out;
  const Point lo = grid.lower();
  const Point hi = grid.upper();
  stride = std::max<std::size_t>(1, stride);
  for (double r : radii) {
    const Point ext = ball_extent(grid.metric(), lambda_dilation * r);
    for (std::size_t c = 0; c < grid.size(); c += stride) {
      const auto& x = grid.cell(c).center;
      bool inside = true;
      for (std::size_t k = 0; k < x.size() && inside; ++k) {
        const double tol = 1e-12 * (hi[k] - lo[k]);
        inside = x[k] - ext[k] >= lo[k] - tol && x[k] + ext[k] <= hi[k] + tol;
      }
      if (inside) out.push_back({x, r});
    }
  }
  return out;
}

std::vector<Cube> origin_cubes(std::size_t n, int lo, int hi) {
  std::vector<Cube> out;
  for (int j = lo; j <= hi; ++j) out.push_back({Point(n, 0.0), std::ldexp(1.0, j)});
  return out;
}

std::vector<Cube> cube_family(std::size_t n, double r_min, double r_max, double shift) {
  if (!(r_min > 0.0 && r_max >= r_min)) fail(ErrorKind::invalid_input, "need 0 < r_min <= r_max");
  std::vector<Cube> out;
  const int first = static_cast<int>(std::ceil(3.0 * std::log10(r_min) - 1e-9));
  const int last = static_cast<int>(std::floor(3.0 * std::log10(r_max) + 1e-9));
  for (int j = first; j <= last; ++j) {
    const double R = std::pow(10.0, j / 3.0);
    out.push_back({Point(n, 0.0), R});
    Point c(n, 0.0);
    c[0] = shift * R;
    out.push_back({c, R});
  }
  return out;
}

}  // namespace nsob
