#include "fastchain/error.hpp"

namespace fastchain {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::NotIrreducible: return "NotIrreducible";
    case ErrorCode::NotCentered: return "NotCentered";
    case ErrorCode::NotInvariant: return "NotInvariant";
    case ErrorCode::NotNormalized: return "NotNormalized";
    case ErrorCode::ZeroGenerator: return "ZeroGenerator";
    case ErrorCode::CycleBudgetExceeded: return "CycleBudgetExceeded";
    case ErrorCode::TooManyCycles: return "TooManyCycles";
    case ErrorCode::StateSpaceTooLarge: return "StateSpaceTooLarge";
    case ErrorCode::SpectrumAmbiguous: return "SpectrumAmbiguous";
    case ErrorCode::DirectionInvalid: return "DirectionInvalid";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::BudgetInvalid: return "BudgetInvalid";
    case ErrorCode::InvalidTrees: return "InvalidTrees";
    case ErrorCode::SearchExhausted: return "SearchExhausted";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::NotLength3: return "NotLength3";
    case ErrorCode::NotPositive: return "NotPositive";
    case ErrorCode::IdentityKernel: return "IdentityKernel";
    case ErrorCode::SingularMatrix: return "SingularMatrix";
    case ErrorCode::PreconditionViolation: return "PreconditionViolation";
    case ErrorCode::NumericalMismatch: return "NumericalMismatch";
  }
  return "Unknown";
}

}  // namespace fastchain
