#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tqd {

enum class ErrorCategory {
  input,          // malformed files, bad arguments
  invalid_model,  // model/resonator invariants violated
  arity,          // wrong number of observations for a fit
  coverage,       // a required state/label is missing from data
  numerical,      // eigensolver failure, unconverged basis
  fit,            // optimizer did not reach its tolerance
  degeneracy,     // dressed-state labeling is ambiguous
  infeasible,     // data below a fixed model floor
};

std::string_view category_name(ErrorCategory c);

// Exit code convention shared by the CLI: 2 for input-side problems,
// 3 for numerical/fit failures.
int exit_code(ErrorCategory c);

class Error : public std::runtime_error {
public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

private:
  ErrorCategory category_;
};

[[noreturn]] inline void fail(ErrorCategory c, const std::string& what) { throw Error(c, what); }

}  // namespace tqd
