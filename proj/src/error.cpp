#include "nsob/error.hpp"

namespace nsob {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_input: return "invalid-input";
    case ErrorKind::dimension_mismatch: return "dimension-mismatch";
    case ErrorKind::evaluation: return "evaluation";
    case ErrorKind::gamma_mu_violation: return "gamma-mu-violation";
    case ErrorKind::out_of_domain: return "out-of-domain";
    case ErrorKind::infeasible: return "infeasible";
    case ErrorKind::non_convergence: return "non-convergence";
    case ErrorKind::witness_invalid: return "witness-invalid";
    case ErrorKind::incompatible_values: return "incompatible-values";
    case ErrorKind::parameter_range: return "parameter-range";
    case ErrorKind::all_exceptional: return "all-exceptional";
  }
  return "unknown";
}

void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace nsob
