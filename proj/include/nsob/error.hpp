#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace nsob {

enum class ErrorKind {
  invalid_input,
  dimension_mismatch,
  evaluation,
  gamma_mu_violation,
  out_of_domain,
  infeasible,
  non_convergence,
  witness_invalid,
  incompatible_values,
  parameter_range,
  all_exceptional,
};

const char* to_string(ErrorKind kind);

/// Base error for everything the library throws on bad input or failed
/// numerics. The kind drives CLI exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Thrown when the dual coordinate ascent hits its sweep cap. Carries the
/// best primal iterate so callers can still inspect it.
class NonConvergence : public Error {
 public:
  NonConvergence(const std::string& what, std::vector<double> best_g,
                 double best_value)
      : Error(ErrorKind::non_convergence, what),
        best_g_(std::move(best_g)),
        best_value_(best_value) {}

  const std::vector<double>& best_g() const noexcept { return best_g_; }
  double best_value() const noexcept { return best_value_; }

 private:
  std::vector<double> best_g_;
  double best_value_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

}  // namespace nsob
