#pragma once

#include <concepts>
#include <functional>
#include <memory>
#include <optional>
#include <span>

#include "nsob/grid.hpp"

namespace nsob {

using FieldFn = std::function<double(std::span<const double>)>;

/// A scalar field on R^n: either an analytic callable or a piecewise-constant
/// grid function. Path integrals of grid-backed fields go through cell
/// incidence and are exact; analytic ones go through quadrature.
class ScalarField {
 public:
  template <typename F>
    requires std::invocable<const F&, std::span<const double>> &&
             (!std::same_as<std::remove_cvref_t<F>, ScalarField>)
  ScalarField(F f) : fn_(FieldFn(std::move(f))) {}

  ScalarField(GridFunction g);

  static ScalarField constant(double c);

  double operator()(std::span<const double> x) const;

  const GridFunction* grid_function() const noexcept { return grid_.get(); }
  std::optional<double> constant_value() const noexcept { return constant_; }

 private:
  ScalarField() = default;

  FieldFn fn_;
  std::shared_ptr<const GridFunction> grid_;
  std::optional<double> constant_;
};

}  // namespace nsob
