#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace eqres {

enum class ErrorKind {
  invalid_parameter,
  unsupported_group,
  singular_hessian,
  numeric_precision,
  budget_exceeded,
  fit_unstable,
  outside_convergence,
  continuation_unreliable,
  pole_at_zero,
  truncation_too_small,
  truncation_insufficient,
  too_few_points,
  too_few_terms,
  character_inconsistency,
  hypothesis_violation,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_parameter: return "invalid-parameter";
    case ErrorKind::unsupported_group: return "unsupported-group";
    case ErrorKind::singular_hessian: return "singular-hessian";
    case ErrorKind::numeric_precision: return "numeric-precision";
    case ErrorKind::budget_exceeded: return "budget-exceeded";
    case ErrorKind::fit_unstable: return "fit-unstable";
    case ErrorKind::outside_convergence: return "outside-convergence";
    case ErrorKind::continuation_unreliable: return "continuation-unreliable";
    case ErrorKind::pole_at_zero: return "pole-at-zero";
    case ErrorKind::truncation_too_small: return "truncation-too-small";
    case ErrorKind::truncation_insufficient: return "truncation-insufficient";
    case ErrorKind::too_few_points: return "too-few-points";
    case ErrorKind::too_few_terms: return "too-few-terms";
    case ErrorKind::character_inconsistency: return "character-inconsistency";
    case ErrorKind::hypothesis_violation: return "hypothesis-violation";
  }
  return "unknown";
}

/// Exception carrying a machine-readable kind. The CLI maps kinds to exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  /// Validation failures versus numerical diagnostics.
  bool is_validation() const noexcept {
    return kind_ == ErrorKind::invalid_parameter || kind_ == ErrorKind::unsupported_group ||
           kind_ == ErrorKind::truncation_too_small || kind_ == ErrorKind::too_few_points ||
           kind_ == ErrorKind::too_few_terms || kind_ == ErrorKind::outside_convergence;
  }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) fail(kind, what);
}

}  // namespace eqres
