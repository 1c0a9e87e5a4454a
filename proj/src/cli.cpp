#include "nsob/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "json.hpp"

#include "nsob/conditions.hpp"
#include "nsob/error.hpp"
#include "nsob/expression.hpp"
#include "nsob/families.hpp"
#include "nsob/gradients.hpp"
#include "nsob/modulus.hpp"
#include "nsob/parallel.hpp"
#include "nsob/parametrize.hpp"
#include "nsob/sobolev.hpp"

namespace nsob::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

[[noreturn]] void field_error(const std::string& field, const std::string& what) {
  fail(ErrorKind::invalid_input, fmt::format("config field '{}': {}", field, what));
}

std::string num(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  return fmt::format("{:.17g}", v);
}

// ---------------------------------------------------------------- json access

const json& require(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) field_error(where + "." + key, "missing");
  return obj.at(key);
}

double as_number(const json& v, const std::string& field) {
  if (!v.is_number()) field_error(field, "expected a number");
  return v.get<double>();
}

double number_or(const json& obj, const std::string& key, const std::string& where, double fallback) {
  if (!obj.is_object() || !obj.contains(key)) return fallback;
  return as_number(obj.at(key), where + "." + key);
}

std::size_t count_of(const json& v, const std::string& field) {
  if (!v.is_number_integer() || v.get<long long>() < 0) field_error(field, "expected a nonnegative integer");
  return v.get<std::size_t>();
}

std::vector<double> number_list(const json& v, const std::string& field) {
  if (!v.is_array()) field_error(field, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_number(v[i], fmt::format("{}[{}]", field, i)));
  return out;
}

std::string string_of(const json& v, const std::string& field) {
  if (!v.is_string()) field_error(field, "expected a string");
  return v.get<std::string>();
}

Expression parse_expr(const json& v, const std::string& field) {
  const std::string text = string_of(v, field);
  try {
    return Expression::parse(text);
  } catch (const Error& e) {
    field_error(field, e.what());
  }
}

// ---------------------------------------------------------------- csv

std::string grid_csv(const std::vector<double>& values) {
  std::string s = "cell,value\n";
  for (std::size_t c = 0; c < values.size(); ++c) s += fmt::format("{},{}\n", c, num(values[c]));
  return s;
}

std::vector<double> read_grid_csv(const fs::path& file, std::size_t cells, const std::string& field) {
  std::ifstream in(file);
  if (!in) field_error(field, fmt::format("cannot read '{}'", file.string()));
  std::string line;
  std::vector<double> values(cells, 0.0);
  std::vector<char> seen(cells, 0);
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || (lineno == 1 && line.rfind("cell", 0) == 0)) continue;
    const auto comma = line.find(',');
    try {
      if (comma == std::string::npos) throw std::invalid_argument("no comma");
      const std::size_t c = std::stoul(line.substr(0, comma));
      const double v = std::stod(line.substr(comma + 1));
      if (c >= cells) field_error(field, fmt::format("{}:{}: cell {} out of range", file.string(), lineno, c));
      values[c] = v;
      seen[c] = 1;
    } catch (const std::logic_error&) {
      field_error(field, fmt::format("{}:{}: malformed row '{}'", file.string(), lineno, line));
    }
  }
  for (std::size_t c = 0; c < cells; ++c)
    if (!seen[c]) field_error(field, fmt::format("'{}' has no value for cell {}", file.string(), c));
  return values;
}

// ---------------------------------------------------------------- context

struct Output {
  std::vector<std::string> report;
  std::vector<std::pair<std::string, std::string>> summary;
  std::vector<std::pair<std::string, std::string>> files;
  bool hard_violation = false;

  void line(const std::string& s) { report.push_back(s); }
  void kv(const std::string& k, const std::string& v) { summary.emplace_back(k, v); }
  void kv(const std::string& k, double v) { summary.emplace_back(k, num(v)); }
  void kv(const std::string& k, std::size_t v) { summary.emplace_back(k, std::to_string(v)); }
};

struct Function {
  std::optional<Expression> expr;
  std::optional<GridFunction> values;
};

class Context {
 public:
  Context(json config, fs::path base_dir, std::optional<std::uint64_t> seed, SolverOptions solver,
          AveragingConvention convention)
      : config_(std::move(config)), base_(std::move(base_dir)), seed_(seed), solver_(solver),
        convention_(convention) {}

  const SolverOptions& solver() const { return solver_; }
  AveragingConvention convention() const { return convention_; }

  const json& task(const std::string& name) const {
    static const json empty = json::object();
    if (!config_.contains("tasks")) return empty;
    const json& t = config_.at("tasks");
    if (!t.is_object()) field_error("tasks", "expected an object");
    if (!t.contains(name)) return empty;
    if (!t.at(name).is_object()) field_error("tasks." + name, "expected an object");
    return t.at(name);
  }

  std::uint64_t seed(const json& obj, const std::string& where) const {
    if (seed_) return *seed_;
    if (!obj.contains("seed")) field_error(where + ".seed", "a seed is required for stochastic generators");
    const json& s = obj.at("seed");
    if (!s.is_number_integer()) field_error(where + ".seed", "expected an integer");
    return s.get<std::uint64_t>();
  }

  const std::shared_ptr<const GroundGrid>& grid() {
    if (!grid_) grid_ = build_grid();
    return grid_;
  }

  const PathMeasure& measure() {
    if (!measure_) measure_ = build_measure();
    return *measure_;
  }

  const std::vector<Polyline>& family() {
    if (!family_) family_ = build_family();
    return *family_;
  }

  Function function(const std::string& task_name, const json& task, const std::string& key) {
    const std::string where = "tasks." + task_name + "." + key;
    const std::string name = string_of(require(task, key, "tasks." + task_name), where);
    if (!config_.contains("functions") || !config_.at("functions").contains(name))
      field_error(where, fmt::format("no function named '{}' under 'functions'", name));
    const json& entry = config_.at("functions").at(name);
    const std::string field = "functions." + name;
    Function f;
    if (entry.is_string()) {
      f.expr = parse_expr(entry, field);
    } else if (entry.is_object() && entry.contains("expr")) {
      f.expr = parse_expr(entry.at("expr"), field + ".expr");
    } else if (entry.is_object() && entry.contains("csv")) {
      const fs::path file = base_ / string_of(entry.at("csv"), field + ".csv");
      f.values = GridFunction(grid(), read_grid_csv(file, grid()->size(), field + ".csv"));
    } else {
      field_error(field, "expected an expression string, {\"expr\": ...} or {\"csv\": ...}");
    }
    if (f.expr && f.expr->arity() > grid()->dimension())
      field_error(field, fmt::format("expression uses coordinate {} in a {}-d space", f.expr->arity() - 1,
                                     grid()->dimension()));
    return f;
  }

  GridFunction on_grid(const Function& f) {
    if (f.values) return *f.values;
    const Expression e = *f.expr;
    return GridFunction::sample(grid(), [e](std::span<const double> x) { return e(x); });
  }

  // pointwise reading: the expression, or interpolation between centers
  ScalarField pointwise(const Function& f) {
    if (f.expr) {
      const Expression e = *f.expr;
      return ScalarField([e](std::span<const double> x) { return e(x); });
    }
    return interpolated(*f.values);
  }

  // density reading: the expression, or the piecewise-constant grid function
  ScalarField density(const Function& f) {
    if (f.expr) return pointwise(f);
    return ScalarField(*f.values);
  }

 private:
  MetricDescriptor build_metric(const json& space) {
    const std::size_t n = require(space, "lower", "space").size();
    if (!space.contains("metric")) return MetricDescriptor::euclidean(n);
    const json& m = space.at("metric");
    const std::string kind = string_of(require(m, "kind", "space.metric"), "space.metric.kind");
    if (kind == "euclidean") return MetricDescriptor::euclidean(n);
    if (kind == "parabolic") return MetricDescriptor::parabolic(n);
    if (kind == "anisotropic") {
      auto alpha = number_list(require(m, "exponents", "space.metric"), "space.metric.exponents");
      if (alpha.size() != n) field_error("space.metric.exponents", fmt::format("expected {} exponents", n));
      BaseNorm base = BaseNorm::max;
      if (m.contains("base")) {
        const std::string b = string_of(m.at("base"), "space.metric.base");
        if (b == "max") base = BaseNorm::max;
        else if (b == "euclidean") base = BaseNorm::euclidean;
        else if (b == "p_norm") base = BaseNorm::p_norm;
        else field_error("space.metric.base", "expected max, euclidean or p_norm");
      }
      try {
        return MetricDescriptor::anisotropic(alpha, base, number_or(m, "base_exponent", "space.metric", 2.0));
      } catch (const Error& e) {
        field_error("space.metric", e.what());
      }
    }
    field_error("space.metric.kind", fmt::format("unknown metric '{}'", kind));
  }

  std::shared_ptr<const GroundGrid> build_grid() {
    const json& space = require(config_, "space", "config");
    const auto lower = number_list(require(space, "lower", "space"), "space.lower");
    const auto upper = number_list(require(space, "upper", "space"), "space.upper");
    const json& cells_json = require(space, "cells", "space");
    if (!cells_json.is_array()) field_error("space.cells", "expected an array of counts");
    std::vector<std::size_t> counts;
    for (std::size_t i = 0; i < cells_json.size(); ++i)
      counts.push_back(count_of(cells_json[i], fmt::format("space.cells[{}]", i)));
    if (lower.size() != upper.size() || lower.size() != counts.size())
      field_error("space", "lower, upper and cells must have the same length");
    std::optional<GroundGrid> grid;
    try {
      grid = GroundGrid::uniform(lower, upper, counts, build_metric(space));
    } catch (const Error& e) {
      field_error("space", e.what());
    }
    if (space.contains("weight")) {
      const Expression w = parse_expr(space.at("weight"), "space.weight");
      const double power = number_or(space, "weight_power", "space", 1.0);
      grid = grid->with_weight([w](std::span<const double> x) { return w(x); }, power);
    } else if (space.contains("measures_csv")) {
      const fs::path file = base_ / string_of(space.at("measures_csv"), "space.measures_csv");
      grid = grid->with_measures(read_grid_csv(file, grid->size(), "space.measures_csv"));
    }
    return std::make_shared<const GroundGrid>(std::move(*grid));
  }

  PathMeasure build_measure() {
    if (!config_.contains("measure")) return PathMeasure::arc_length();
    const json& m = config_.at("measure");
    const std::string kind = string_of(require(m, "kind", "measure"), "measure.kind");
    std::optional<PathMeasure> out;
    if (kind == "arc_length") out = PathMeasure::arc_length();
    else if (kind == "parabolic_height") out = PathMeasure::parabolic_height();
    else if (kind == "weighted") {
      const Expression w = parse_expr(require(m, "omega", "measure"), "measure.omega");
      out = PathMeasure::weighted([w](std::span<const double> x) { return w(x); });
    } else if (kind == "density") {
      try {
        out = PathMeasure::density(number_list(require(m, "arc", "measure"), "measure.arc"),
                                   number_list(require(m, "values", "measure"), "measure.values"));
      } catch (const Error& e) {
        field_error("measure", e.what());
      }
    } else {
      field_error("measure.kind", fmt::format("unknown path measure '{}'", kind));
    }
    if (m.contains("scale")) out = out->scaled(as_number(m.at("scale"), "measure.scale"));
    return *out;
  }

  std::vector<Polyline> build_family() {
    std::vector<Polyline> out;
    if (!config_.contains("families")) return out;
    const json& fams = config_.at("families");
    if (!fams.is_array()) field_error("families", "expected an array");
    for (std::size_t i = 0; i < fams.size(); ++i) {
      const std::string where = fmt::format("families[{}]", i);
      const json& f = fams[i];
      if (f.contains("paths")) {
        const json& paths = f.at("paths");
        if (!paths.is_array()) field_error(where + ".paths", "expected an array of vertex lists");
        for (std::size_t j = 0; j < paths.size(); ++j) {
          const std::string pw = fmt::format("{}.paths[{}]", where, j);
          if (!paths[j].is_array()) field_error(pw, "expected an array of points");
          std::vector<Point> verts;
          for (std::size_t v = 0; v < paths[j].size(); ++v)
            verts.push_back(number_list(paths[j][v], fmt::format("{}[{}]", pw, v)));
          try {
            out.emplace_back(std::move(verts));
          } catch (const Error& e) {
            field_error(pw, e.what());
          }
        }
        continue;
      }
      const std::string gen = string_of(require(f, "generator", where), where + ".generator");
      if (gen == "slope_family") {
        const double k = as_number(require(f, "k", where), where + ".k");
        const json& region = require(f, "region", where);
        Box box{number_list(require(region, "lower", where + ".region"), where + ".region.lower"),
                number_list(require(region, "upper", where + ".region"), where + ".region.upper")};
        const std::size_t count = count_of(require(f, "count", where), where + ".count");
        const std::uint64_t s = seed(f, where);
        try {
          for (auto& p : generate_slope_family(k, box, count, s)) out.push_back(std::move(p));
        } catch (const Error& e) {
          field_error(where, e.what());
        }
      } else if (gen == "axis") {
        for (auto& p : axis_path_family(*grid())) out.push_back(std::move(p));
      } else {
        field_error(where + ".generator", fmt::format("unknown generator '{}'", gen));
      }
    }
    return out;
  }

  json config_;
  fs::path base_;
  std::optional<std::uint64_t> seed_;
  SolverOptions solver_;
  AveragingConvention convention_;
  std::shared_ptr<const GroundGrid> grid_;
  std::optional<PathMeasure> measure_;
  std::optional<std::vector<Polyline>> family_;
};

std::string point_text(const Point& x) {
  std::string s = "(";
  for (std::size_t k = 0; k < x.size(); ++k) s += (k ? ", " : "") + num(x[k]);
  return s + ")";
}

std::string witness_text(const Witness& w) {
  struct Visitor {
    std::string operator()(std::monostate) const { return "none"; }
    std::string operator()(const Ball& b) const { return fmt::format("ball center {} radius {}", point_text(b.center), num(b.radius)); }
    std::string operator()(const Cube& c) const { return fmt::format("cube center {} half side {}", point_text(c.center), num(c.half_side)); }
    std::string operator()(const PathWitness& p) const {
      return p.piece < 0 ? fmt::format("path {}", p.path) : fmt::format("path {} piece {}", p.path, p.piece);
    }
    std::string operator()(const PairWitness& p) const { return fmt::format("cells {} and {}", p.i, p.j); }
  };
  return std::visit(Visitor{}, w);
}

// ---------------------------------------------------------------- tasks

void task_modulus(Context& ctx, Output& out) {
  const json& t = ctx.task("modulus");
  const double p = number_or(t, "p", "tasks.modulus", 2.0);
  const auto& family = ctx.family();
  const auto r = modulus_p(family, *ctx.grid(), ctx.measure(), p, ctx.solver());
  out.kv("p", p);
  out.kv("paths", family.size());
  out.kv("cells", ctx.grid()->size());
  out.kv("value", r.value);
  if (r.offending_path) {
    out.kv("offending_path", *r.offending_path);
    out.line(fmt::format("modulus is +inf: path {} meets no cell with positive weight", *r.offending_path));
    return;
  }
  out.kv("dual_bound", r.dual_bound);
  out.kv("duality_gap", r.duality_gap);
  out.kv("max_violation", r.max_violation);
  out.kv("sweeps", r.iterations);
  out.line(fmt::format("p-modulus (p = {}) of {} paths on {} cells", num(p), family.size(), ctx.grid()->size()));
  out.line(fmt::format("  value        {}", num(r.value)));
  out.line(fmt::format("  dual bound   {}", num(r.dual_bound)));
  out.line(fmt::format("  gap          {}", num(r.duality_gap)));
  std::string masses = "path,mass\n";
  for (std::size_t i = 0; i < r.per_path_mass.size(); ++i) masses += fmt::format("{},{}\n", i, num(r.per_path_mass[i]));
  out.files.emplace_back("per_path.csv", masses);
  out.files.emplace_back("extremal_g.csv", grid_csv(r.extremal_g));
}

void task_min_gradient(Context& ctx, Output& out) {
  const json& t = ctx.task("min-gradient");
  const double p = number_or(t, "p", "tasks.min-gradient", 2.0);
  const Function f = ctx.function("min-gradient", t, "f");
  const auto sol = minimal_upper_gradient(ctx.pointwise(f), ctx.family(), *ctx.grid(), ctx.measure(), p, ctx.solver());
  out.kv("p", p);
  out.kv("value", sol.value);
  out.kv("gradient_norm", std::pow(sol.value, 1.0 / p));
  out.kv("duality_gap", sol.duality_gap);
  out.kv("rows", ctx.family().size() * 9);
  out.line(fmt::format("minimal discrete upper gradient, p = {}", num(p)));
  out.line(fmt::format("  sum m rho^p  {}", num(sol.value)));
  out.line(fmt::format("  ||rho||_p    {}", num(std::pow(sol.value, 1.0 / p))));
  out.files.emplace_back("rho.csv", grid_csv(sol.g));
}

void task_verify_gradient(Context& ctx, Output& out) {
  const json& t = ctx.task("verify-gradient");
  const Function f = ctx.function("verify-gradient", t, "f");
  const Function rho = ctx.function("verify-gradient", t, "rho");
  const double tol = number_or(t, "tol_check", "tasks.verify-gradient", 1e-9);
  const auto r = verify_upper_gradient(ctx.pointwise(f), ctx.density(rho), ctx.family(), ctx.measure(), tol);
  out.kv("checked", r.checked_count);
  out.kv("violations", r.violations.size());
  out.kv("max_relative_violation", r.max_relative_violation);
  out.kv("min_slack", r.min_slack);
  out.kv("unverifiable", r.unverifiable.size());
  out.kv("infinite_integral", r.infinite_integral ? "true" : "false");
  out.line(fmt::format("upper-gradient check on {} paths: {} inequalities, {} violations",
                       ctx.family().size(), r.checked_count, r.violations.size()));
  for (std::size_t i : r.unverifiable) out.line(fmt::format("  path {} could not be evaluated", i));
  std::string csv = "path,piece,lhs,rhs,slack\n";
  for (const auto& v : r.violations) {
    const std::string piece = v.kind == CheckKind::whole_path ? "whole" : std::to_string(v.piece);
    csv += fmt::format("{},{},{},{},{}\n", v.path, piece, num(v.lhs), num(v.rhs), num(v.slack));
  }
  out.files.emplace_back("violations.csv", csv);
  if (!r.violations.empty()) out.hard_violation = true;
}

void task_newton_norm(Context& ctx, Output& out) {
  const json& t = ctx.task("newton-norm");
  const double p = number_or(t, "p", "tasks.newton-norm", 2.0);
  const Function f = ctx.function("newton-norm", t, "f");
  const auto n = newton_norm(ctx.on_grid(f), ctx.family(), ctx.measure(), p, ctx.solver());
  out.kv("p", p);
  out.kv("norm", n.norm);
  out.kv("lp", n.lp);
  out.kv("gradient", n.gradient);
  out.line(fmt::format("Newton-Sobolev norm, p = {}", num(p)));
  out.line(fmt::format("  ||f||_p      {}", num(n.lp)));
  out.line(fmt::format("  min ||rho||_p {}", num(n.gradient)));
  out.line(fmt::format("  total        {}", num(n.norm)));
  out.files.emplace_back("rho.csv", grid_csv(n.solution.g));
}

void task_truncate(Context& ctx, Output& out) {
  const json& t = ctx.task("truncate");
  const std::string where = "tasks.truncate";
  const double p = number_or(t, "p", where, 2.0);
  const double beta = number_or(t, "beta", where, 1.0);
  const std::size_t levels = t.contains("levels") ? count_of(t.at("levels"), where + ".levels") : 8;
  std::vector<double> ks = t.contains("k") ? (t.at("k").is_array() ? number_list(t.at("k"), where + ".k")
                                                                   : std::vector<double>{as_number(t.at("k"), where + ".k")})
                                           : std::vector<double>{1, 2, 4, 8, 16};
  const GridFunction f = ctx.on_grid(ctx.function("truncate", t, "f"));
  const GridFunction g = ctx.on_grid(ctx.function("truncate", t, "g"));
  const auto radii = dyadic_radii(*ctx.grid(), levels);
  std::string csv = "k,lp_error,extension_constant,holder_constant,measure_Ek,weak_type_ratio,covering_constant,exceptional_cells\n";
  out.line(fmt::format("Lipschitz truncation, beta = {}, p = {}", num(beta), num(p)));
  for (std::size_t i = 0; i < ks.size(); ++i) {
    const auto r = lipschitz_truncation(f, g, ks[i], beta, p, radii);
    csv += fmt::format("{},{},{},{},{},{},{},{}\n", num(r.k), num(r.lp_error), num(r.extension_constant),
                       num(r.holder_constant), num(r.measure_Ek), num(r.weak_type_ratio),
                       num(r.covering_constant), r.exceptional.size());
    out.kv(fmt::format("k{}.k", i), r.k);
    out.kv(fmt::format("k{}.lp_error", i), r.lp_error);
    out.kv(fmt::format("k{}.holder_constant", i), r.holder_constant);
    out.kv(fmt::format("k{}.measure_Ek", i), r.measure_Ek);
    out.kv(fmt::format("k{}.weak_type_ratio", i), r.weak_type_ratio);
    out.kv(fmt::format("k{}.covering_constant", i), r.covering_constant);
    out.line(fmt::format("  k = {}: |E_k| = {} cells, ||f - f_k||_p = {}, Holder constant {}", num(r.k),
                         r.exceptional.size(), num(r.lp_error), num(r.holder_constant)));
    out.files.emplace_back(fmt::format("f_k_{}.csv", i), grid_csv(r.f_k.values()));
  }
  out.files.emplace_back("truncation.csv", csv);
}

void task_hajlasz(Context& ctx, Output& out) {
  const json& t = ctx.task("hajlasz");
  const std::string where = "tasks.hajlasz";
  const double p = number_or(t, "p", where, 2.0);
  const double beta = number_or(t, "beta", where, 1.0);
  const auto& grid = *ctx.grid();
  const GridFunction f = ctx.on_grid(ctx.function("hajlasz", t, "f"));
  HajlaszOptions opts;
  opts.solver = ctx.solver();
  if (grid.size() > opts.full_enumeration_limit) opts.seed = ctx.seed(t, where);
  std::vector<Point> points;
  for (const auto& c : grid.cells()) points.push_back(c.center);
  const auto sol = hajlasz_minimal(f.values(), points, beta, p, grid.measures(), grid.metric(), opts);
  const double seminorm = std::pow(sol.value, 1.0 / p);
  out.kv("p", p);
  out.kv("beta", beta);
  out.kv("value", sol.value);
  out.kv("seminorm", seminorm);
  out.line(fmt::format("discrete Hajlasz seminorm, beta = {}, p = {}: {}", num(beta), num(p), num(seminorm)));
  if (t.contains("compare_newton") && t.at("compare_newton").get<bool>()) {
    const auto grad = minimal_upper_gradient(interpolated(f), ctx.family(), grid, ctx.measure(), p, ctx.solver());
    const double newton = std::pow(grad.value, 1.0 / p);
    out.kv("newton_gradient", newton);
    out.kv("ratio", newton > 0.0 ? seminorm / newton : INFINITY);
    out.line(fmt::format("  minimal upper gradient norm {}, ratio {}", num(newton),
                         num(newton > 0.0 ? seminorm / newton : INFINITY)));
  }
  out.files.emplace_back("g.csv", grid_csv(sol.g));
}

void task_poincare(Context& ctx, Output& out) {
  const json& t = ctx.task("poincare");
  const std::string where = "tasks.poincare";
  const double p = number_or(t, "p", where, 2.0);
  const double beta = number_or(t, "beta", where, 1.0);
  const double lambda = number_or(t, "lambda", where, 1.0);
  const std::size_t stride = t.contains("stride") ? count_of(t.at("stride"), where + ".stride") : 1;
  const GridFunction f = ctx.on_grid(ctx.function("poincare", t, "f"));
  const GridFunction rho = ctx.on_grid(ctx.function("poincare", t, "rho"));
  std::vector<double> radii = t.contains("radii")
                                  ? number_list(t.at("radii"), where + ".radii")
                                  : dyadic_radii(*ctx.grid(), t.contains("levels") ? count_of(t.at("levels"), where + ".levels") : 8);
  const auto balls = ball_family(*ctx.grid(), radii, lambda, stride);
  const auto r = poincare_constant(f, rho, balls, beta, lambda, p, ctx.convention());
  out.kv("best_constant", r.best_constant);
  out.kv("witness", witness_text(r.witness));
  out.kv("samples", r.samples_checked);
  out.kv("skipped", r.skipped);
  out.kv("hard_violations", r.hard_violations);
  out.line(fmt::format("Poincare constant >= {} over {} balls ({})", num(r.best_constant), r.samples_checked,
                       witness_text(r.witness)));
  if (r.hard_violations) out.line(fmt::format("  {} balls with zero gradient term but oscillating f", r.hard_violations));
  std::string csv = "ball,radius,ratio\n";
  for (std::size_t i = 0; i < balls.size(); ++i) csv += fmt::format("{},{},{}\n", i, num(balls[i].radius), num(r.ratios[i]));
  out.files.emplace_back("ratios.csv", csv);
  if (r.hard_violations) out.hard_violation = true;
}

void task_arc_chord(Context& ctx, Output& out) {
  const json& t = ctx.task("arc-chord");
  const double beta = number_or(t, "beta", "tasks.arc-chord", 1.0);
  const auto r = arc_chord_constant(ctx.family(), ctx.measure(), beta, ctx.grid()->metric());
  out.kv("beta", beta);
  out.kv("best_constant", r.best_constant);
  out.kv("witness", witness_text(r.witness));
  out.kv("samples", r.samples_checked);
  out.line(fmt::format("arc-chord constant >= {} ({})", num(r.best_constant), witness_text(r.witness)));
  std::string csv = "sample,ratio\n";
  for (std::size_t i = 0; i < r.ratios.size(); ++i) csv += fmt::format("{},{}\n", i, num(r.ratios[i]));
  out.files.emplace_back("ratios.csv", csv);
}

void task_weights(Context& ctx, Output& out) {
  const json& t = ctx.task("weights");
  const std::string where = "tasks.weights";
  const double n = as_number(require(t, "n", where), where + ".n");
  const double p = as_number(require(t, "p", where), where + ".p");
  const double lambda = number_or(t, "lambda", where, 0.0);
  const double q = t.contains("q") ? as_number(t.at("q"), where + ".q") : power_weight_exponent(n, p, lambda);
  const double alpha = number_or(t, "alpha", where, 1.0 / n);
  FieldFn omega;
  if (t.contains("omega")) {
    const Expression e = parse_expr(t.at("omega"), where + ".omega");
    omega = [e](std::span<const double> x) { return e(x); };
  } else {
    omega = [lambda](std::span<const double> x) {
      double r2 = 0.0;
      for (double v : x) r2 += v * v;
      return std::pow(r2, -0.5 * lambda);
    };
  }
  const FieldFn omega_p = [omega, p](std::span<const double> x) { return std::pow(omega(x), p); };
  const FieldFn one = [](std::span<const double>) { return 1.0; };

  std::vector<Cube> cubes;
  const std::size_t dim = static_cast<std::size_t>(n);
  if (t.contains("origin")) {
    const auto range = number_list(t.at("origin"), where + ".origin");
    if (range.size() != 2) field_error(where + ".origin", "expected [lowest exponent, highest exponent]");
    cubes = origin_cubes(dim, static_cast<int>(range[0]), static_cast<int>(range[1]));
  } else {
    cubes = origin_cubes(dim, -3, 3);
  }
  if (t.contains("shifted")) {
    const auto range = number_list(t.at("shifted"), where + ".shifted");
    if (range.size() != 2) field_error(where + ".shifted", "expected [r_min, r_max]");
    for (auto& c : cube_family(dim, range[0], range[1])) cubes.push_back(std::move(c));
  }

  const auto growth = growth_check(omega, p, q, n, cubes, ctx.convention());
  const auto apq = apq_check(one, omega_p, p, q, alpha, cubes, ctx.convention());
  std::vector<double> finite;
  for (double r : growth.ratios)
    if (!std::isnan(r)) finite.push_back(r);
  std::sort(finite.begin(), finite.end());
  const double median = finite.empty() ? NAN : finite[finite.size() / 2];
  const double spread = finite.empty() ? NAN : finite.back() / finite.front();

  out.kv("n", n);
  out.kv("p", p);
  out.kv("lambda", lambda);
  out.kv("q", q);
  out.kv("alpha", alpha);
  out.kv("growth.best_constant", growth.best_constant);
  out.kv("growth.median", median);
  out.kv("growth.spread", spread);
  out.kv("growth.skipped", growth.skipped);
  out.kv("apq.best_constant", apq.best_constant);
  out.kv("apq.skipped", apq.skipped);
  out.line(fmt::format("power-weight exponent q = {}", num(q)));
  out.line(fmt::format("growth ratios over {} cubes: max {}, median {}, max/min {}", growth.samples_checked,
                       num(growth.best_constant), num(median), num(spread)));
  out.line(fmt::format("A_pq constant >= {} ({})", num(apq.best_constant), witness_text(apq.witness)));
  std::string csv = "cube,center0,half_side,growth,apq\n";
  for (std::size_t i = 0; i < cubes.size(); ++i)
    csv += fmt::format("{},{},{},{},{}\n", i, num(cubes[i].center[0]), num(cubes[i].half_side), num(growth.ratios[i]),
                       num(apq.ratios[i]));
  out.files.emplace_back("cubes.csv", csv);
}

void task_embedding(Context& ctx, Output& out) {
  const json& t = ctx.task("embedding");
  const std::string where = "tasks.embedding";
  const double p = as_number(require(t, "p", where), where + ".p");
  const double N = as_number(require(t, "N", where), where + ".N");
  const double beta = number_or(t, "beta", where, 1.0);
  const GridFunction f = ctx.on_grid(ctx.function("embedding", t, "f"));
  const GridFunction g = ctx.on_grid(ctx.function("embedding", t, "g"));
  const std::size_t n = f.size();
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  if (n <= 2000) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  } else {
    std::mt19937_64 rng(ctx.seed(t, where));
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    while (pairs.size() < 2'000'000) {
      const std::size_t i = pick(rng), j = pick(rng);
      if (i != j) pairs.emplace_back(i, j);
    }
  }
  if (p > N / beta) {
    const auto h = embedding_holder_check(f, g, beta, N, p, pairs);
    out.kv("holder.alpha", h.parameters.at("alpha"));
    out.kv("holder.best_constant", h.best_constant);
    out.kv("holder.ratio_to_g_norm", h.parameters.at("ratio_to_g_norm"));
    out.line(fmt::format("Holder-{} constant >= {} ({}), ||g||_p = {}", num(h.parameters.at("alpha")),
                         num(h.best_constant), witness_text(h.witness), num(h.parameters.at("g_norm"))));
  } else {
    out.line("Holder embedding skipped: needs p > N / beta");
  }
  if (t.contains("q")) {
    const double q = as_number(t.at("q"), where + ".q");
    const auto r = embedding_pstar_check(f, g, q, p, N, beta);
    out.kv("pstar.p_star", r.parameters.at("p_star"));
    out.kv("pstar.constant", r.best_constant);
    out.kv("pstar.hard_violations", r.hard_violations);
    out.line(fmt::format("p* = {}: ||u - u_X||_p* / (diam^(beta - 1/q) ||g||_p) = {}", num(r.parameters.at("p_star")),
                         num(r.best_constant)));
    if (r.hard_violations) out.hard_violation = true;
  }
}

void task_parametrize(Context& ctx, Output& out) {
  const json& t = ctx.task("parametrize");
  const std::string where = "tasks.parametrize";
  const std::size_t samples = t.contains("samples") ? count_of(t.at("samples"), where + ".samples") : 100;
  const auto& family = ctx.family();
  std::vector<std::size_t> which;
  if (t.contains("path")) {
    const std::size_t i = count_of(t.at("path"), where + ".path");
    if (i >= family.size()) field_error(where + ".path", fmt::format("only {} paths are defined", family.size()));
    which.push_back(i);
  } else {
    for (std::size_t i = 0; i < family.size(); ++i) which.push_back(i);
  }
  std::string csv = "path,s,t";
  for (std::size_t k = 0; k < ctx.grid()->dimension(); ++k) csv += fmt::format(",x{}", k);
  csv += ",nu\n";
  double worst = 0.0;
  for (std::size_t i : which) {
    ParametrizedPath pp(family[i], ctx.measure());
    out.kv(fmt::format("path{}.h", i), pp.h());
    for (std::size_t j = 0; j <= samples; ++j) {
      const double s = pp.h() * static_cast<double>(j) / static_cast<double>(std::max<std::size_t>(samples, 1));
      const double tt = pp.parameter_at(s);
      const Point x = family[i].at(tt);
      const double nu = pp.nu(tt);
      worst = std::max(worst, std::abs(nu - s));
      csv += fmt::format("{},{},{}", i, num(s), num(tt));
      for (double v : x) csv += "," + num(v);
      csv += "," + num(nu) + "\n";
    }
  }
  out.kv("max_nu_error", worst);
  out.line(fmt::format("mu-arc-length parametrization of {} paths; max |nu(gamma_h(s)) - s| = {}", which.size(), num(worst)));
  out.files.emplace_back("parametrization.csv", csv);
}

const std::vector<std::pair<std::string, std::function<void(Context&, Output&)>>>& table() {
  static const std::vector<std::pair<std::string, std::function<void(Context&, Output&)>>> t = {
      {"modulus", task_modulus},         {"min-gradient", task_min_gradient},
      {"verify-gradient", task_verify_gradient}, {"newton-norm", task_newton_norm},
      {"truncate", task_truncate},       {"hajlasz", task_hajlasz},
      {"poincare", task_poincare},       {"arc-chord", task_arc_chord},
      {"weights", task_weights},         {"embedding", task_embedding},
      {"parametrize", task_parametrize},
  };
  return t;
}

std::string usage() {
  std::string s = "usage: nsob <subcommand> --config FILE [--out-dir DIR] [--threads N] [--tol-feas X]\n"
                  "            [--tol-gap X] [--average-convention standard|alternate] [--strict] [--seed N]\n"
                  "            [--max-sweeps N]\n"
                  "subcommands:";
  for (const auto& name : subcommands()) s += " " + name;
  return s + "\n";
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream o(path, std::ios::binary);
  if (!o) fail(ErrorKind::invalid_input, fmt::format("cannot write '{}'", path.string()));
  o << content;
}

}  // namespace

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [name, fn] : table()) v.push_back(name);
    return v;
  }();
  return names;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Newton-Sobolev toolkit", "nsob"};
  std::string sub, config_path, out_dir = ".", convention = "standard";
  std::size_t threads = 1;
  double tol_feas = SolverOptions{}.tol_feas, tol_gap = SolverOptions{}.tol_gap;
  bool strict = false;
  std::optional<std::uint64_t> seed;
  app.add_option("subcommand", sub, "task to run");
  app.add_option("--config", config_path, "experiment JSON");
  app.add_option("--out-dir", out_dir, "directory for report.txt, summary.kv and CSV files");
  app.add_option("--threads", threads, "worker threads (0 = all cores)");
  app.add_option("--tol-feas", tol_feas, "relative feasibility tolerance");
  app.add_option("--tol-gap", tol_gap, "relative duality-gap tolerance");
  app.add_option("--average-convention", convention, "standard or alternate")->check(CLI::IsMember({"standard", "alternate"}));
  app.add_flag("--strict", strict, "exit 4 on hard condition violations");
  app.add_option("--seed", seed, "seed overriding every config seed");
  std::size_t max_sweeps = SolverOptions{}.max_sweeps;
  app.add_option("--max-sweeps", max_sweeps, "solver sweep cap");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << usage();
      return ok;
    }
    err << "error: " << e.what() << "\n" << usage();
    return validation_error;
  }
  const auto& names = subcommands();
  if (sub.empty() || std::find(names.begin(), names.end(), sub) == names.end()) {
    err << (sub.empty() ? std::string("error: no subcommand given\n") : fmt::format("error: unknown subcommand '{}'\n", sub))
        << usage();
    return validation_error;
  }
  if (config_path.empty()) {
    err << "error: --config is required\n" << usage();
    return validation_error;
  }

  try {
    std::ifstream in(config_path);
    if (!in) fail(ErrorKind::invalid_input, fmt::format("cannot read config '{}'", config_path));
    json config;
    try {
      config = json::parse(in);
    } catch (const json::parse_error& e) {
      fail(ErrorKind::invalid_input, fmt::format("config '{}' is not valid JSON: {}", config_path, e.what()));
    }
    if (!config.is_object()) fail(ErrorKind::invalid_input, "config must be a JSON object");
    set_thread_count(threads);
    SolverOptions solver;
    solver.tol_feas = tol_feas;
    solver.tol_gap = tol_gap;
    solver.max_sweeps = max_sweeps;
    Context ctx(std::move(config), fs::path(config_path).parent_path(), seed, solver,
                convention == "alternate" ? AveragingConvention::alternate : AveragingConvention::standard);

    Output result;
    for (const auto& [name, fn] : table())
      if (name == sub) fn(ctx, result);

    fs::create_directories(out_dir);
    std::string report = fmt::format("nsob {}\nconfig: {}\n\n", sub, config_path);
    for (const auto& l : result.report) report += l + "\n";
    write_file(fs::path(out_dir) / "report.txt", report);
    std::string kv;
    for (const auto& [k, v] : result.summary) kv += k + "=" + v + "\n";
    write_file(fs::path(out_dir) / "summary.kv", kv);
    for (const auto& [name, content] : result.files) write_file(fs::path(out_dir) / name, content);
    out << report;
    if (strict && result.hard_violation) {
      err << "hard violation reported (--strict)\n";
      return hard_violation;
    }
    return ok;
  } catch (const NonConvergence& e) {
    err << "error: " << e.what() << "\n";
    return non_convergence;
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return validation_error;
  } catch (const nlohmann::json::exception& e) {
    err << "error: config: " << e.what() << "\n";
    return validation_error;
  }
}

}  // namespace nsob::cli
