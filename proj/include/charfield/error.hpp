#pragma once

#include <stdexcept>
#include <string>

namespace charfield {

enum class Errc {
  NonPrime,
  SizeExceeded,
  FactorizationIncomplete,
  DivisionByZero,
  ContextMismatch,
  ZeroElement,
  NotADivisor,
  ZeroPolynomial,
  NotAGenerator,
  UndefinedEverywhere,
  PreconditionFailed,
  HypothesisFailed,
  BothTrivial,
  SearchExhausted,
  ZeroFunction,
  ConsistencyFailure,
  InvalidArgument,
  IoError,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::NonPrime: return "NonPrime";
    case Errc::SizeExceeded: return "SizeExceeded";
    case Errc::FactorizationIncomplete: return "FactorizationIncomplete";
    case Errc::DivisionByZero: return "DivisionByZero";
    case Errc::ContextMismatch: return "ContextMismatch";
    case Errc::ZeroElement: return "ZeroElement";
    case Errc::NotADivisor: return "NotADivisor";
    case Errc::ZeroPolynomial: return "ZeroPolynomial";
    case Errc::NotAGenerator: return "NotAGenerator";
    case Errc::UndefinedEverywhere: return "UndefinedEverywhere";
    case Errc::PreconditionFailed: return "PreconditionFailed";
    case Errc::HypothesisFailed: return "HypothesisFailed";
    case Errc::BothTrivial: return "BothTrivial";
    case Errc::SearchExhausted: return "SearchExhausted";
    case Errc::ZeroFunction: return "ZeroFunction";
    case Errc::ConsistencyFailure: return "ConsistencyFailure";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::IoError: return "IoError";
  }
  return "Unknown";
}

/// Every library failure is reported as an Error carrying a machine-readable code.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace charfield
