#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace binform {

enum class ErrorCode {
  NonMonic,
  ZeroDiscriminant,
  RationalRootFound,
  DegreeTooLarge,
  ZeroIdeal,
  EvenPrime,
  NotCoprime,
  GeneratorNotFound,
  Overflow,
  DegreeParity,
  ResultantZero,
  BudgetExhausted,
  NotIrreducible,
  TProportional,
  ConditionViolated,
  ModulusTooSmall,
  FormVanishes,
  NotInPointSet,
  StrongAdmissibilityFailed,
  PreconditionFailed,
  BadLattice,
  DivergenceGuard,
  HypothesisViolated,
  DomainError,
  DegenerateBox,
  InfiniteLocalVolume,
  Unsupported,
  ConfigInvalid,
  ScheduleTooShort,
  AdmissibilityFailed,
  TooLarge,
  Unbounded,
};

inline std::string_view error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::NonMonic: return "NonMonic";
    case ErrorCode::ZeroDiscriminant: return "ZeroDiscriminant";
    case ErrorCode::RationalRootFound: return "RationalRootFound";
    case ErrorCode::DegreeTooLarge: return "DegreeTooLarge";
    case ErrorCode::ZeroIdeal: return "ZeroIdeal";
    case ErrorCode::EvenPrime: return "EvenPrime";
    case ErrorCode::NotCoprime: return "NotCoprime";
    case ErrorCode::GeneratorNotFound: return "GeneratorNotFound";
    case ErrorCode::Overflow: return "Overflow";
    case ErrorCode::DegreeParity: return "DegreeParity";
    case ErrorCode::ResultantZero: return "ResultantZero";
    case ErrorCode::BudgetExhausted: return "BudgetExhausted";
    case ErrorCode::NotIrreducible: return "NotIrreducible";
    case ErrorCode::TProportional: return "TProportional";
    case ErrorCode::ConditionViolated: return "ConditionViolated";
    case ErrorCode::ModulusTooSmall: return "ModulusTooSmall";
    case ErrorCode::FormVanishes: return "FormVanishes";
    case ErrorCode::NotInPointSet: return "NotInPointSet";
    case ErrorCode::StrongAdmissibilityFailed: return "StrongAdmissibilityFailed";
    case ErrorCode::PreconditionFailed: return "PreconditionFailed";
    case ErrorCode::BadLattice: return "BadLattice";
    case ErrorCode::DivergenceGuard: return "DivergenceGuard";
    case ErrorCode::HypothesisViolated: return "HypothesisViolated";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::DegenerateBox: return "DegenerateBox";
    case ErrorCode::InfiniteLocalVolume: return "InfiniteLocalVolume";
    case ErrorCode::Unsupported: return "Unsupported";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::ScheduleTooShort: return "ScheduleTooShort";
    case ErrorCode::AdmissibilityFailed: return "AdmissibilityFailed";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::Unbounded: return "Unbounded";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace binform
