#pragma once

#include <memory>
#include <span>
#include <string>

namespace nsob {

/// Small arithmetic language over coordinates.
///   numbers, pi; variables x, y, z or x0, x1, ...
///   + - * / ^ (right-associative), unary minus, parentheses
///   abs(a), sqrt(a), exp(a), log(a), min(a, b, ...), max(a, b, ...)
class Expression {
 public:
  /// Throws ErrorKind::invalid_input with the offending column.
  static Expression parse(const std::string& text);

  double operator()(std::span<const double> x) const;

  const std::string& text() const noexcept { return text_; }
  /// Highest coordinate index referenced plus one.
  std::size_t arity() const noexcept { return arity_; }

  struct Node;

 private:
  std::string text_;
  std::shared_ptr<const Node> root_;
  std::size_t arity_ = 0;
};

}  // namespace nsob
