#include "tqd/error.hpp"

namespace tqd {

std::string_view category_name(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::input: return "input";
    case ErrorCategory::invalid_model: return "invalid-model";
    case ErrorCategory::arity: return "arity";
    case ErrorCategory::coverage: return "coverage";
    case ErrorCategory::numerical: return "numerical";
    case ErrorCategory::fit: return "fit";
    case ErrorCategory::degeneracy: return "degeneracy";
    case ErrorCategory::infeasible: return "infeasible";
  }
  return "unknown";
}

int exit_code(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::input:
    case ErrorCategory::invalid_model:
    case ErrorCategory::arity:
    case ErrorCategory::coverage:
      return 2;
    default:
      return 3;
  }
}

}  // namespace tqd
