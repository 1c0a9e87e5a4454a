#include "nsob/field.hpp"

#include "nsob/error.hpp"

namespace nsob {

ScalarField::ScalarField(GridFunction g)
    : grid_(std::make_shared<const GridFunction>(std::move(g))) {}

ScalarField ScalarField::constant(double c) {
  ScalarField f;
  f.constant_ = c;
  return f;
}

double ScalarField::operator()(std::span<const double> x) const {
  if (constant_) return *constant_;
  if (grid_) return grid_->at(x);
  if (!fn_) fail(ErrorKind::evaluation, "empty scalar field");
  return fn_(x);
}

}  // namespace nsob
