#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fastchain {

enum class ErrorCode {
  InvalidInput,
  NotIrreducible,
  NotCentered,
  NotInvariant,
  NotNormalized,
  ZeroGenerator,
  CycleBudgetExceeded,
  TooManyCycles,
  StateSpaceTooLarge,
  SpectrumAmbiguous,
  DirectionInvalid,
  DomainError,
  BudgetInvalid,
  InvalidTrees,
  SearchExhausted,
  NotConverged,
  NotLength3,
  NotPositive,
  IdentityKernel,
  SingularMatrix,
  PreconditionViolation,
  NumericalMismatch,
};

std::string_view to_string(ErrorCode code);

/// Every library failure is reported through this exception; `code()` lets
/// callers (the CLI in particular) map failures onto exit statuses.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace fastchain
