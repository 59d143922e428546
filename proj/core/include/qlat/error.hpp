#pragma once
// Shared error taxonomy.  Conditions that are verdicts rather than failures
// (NoSolution, NotInGamma, Overflow of an enumeration) are modeled as result
// values in their modules, not exceptions.
#include <stdexcept>
#include <string>

namespace qlat {

enum class Errc {
  TagMismatch,
  NoDeclaredMap,
  NotCoprime,
  ClosureTooLarge,
  NoEligibleT,
  HypothesisFailed,
  UnsupportedN,
  NotRegular,
  ZeroIdeal,
  TooLarge,
  NonUnitGenerator,
  ActionNotWellDefined,
  NotReducible,
  ZeroExponent,
  BadInput,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::TagMismatch: return "TagMismatch";
    case Errc::NoDeclaredMap: return "NoDeclaredMap";
    case Errc::NotCoprime: return "NotCoprime";
    case Errc::ClosureTooLarge: return "ClosureTooLarge";
    case Errc::NoEligibleT: return "NoEligibleT";
    case Errc::HypothesisFailed: return "HypothesisFailed";
    case Errc::UnsupportedN: return "UnsupportedN";
    case Errc::NotRegular: return "NotRegular";
    case Errc::ZeroIdeal: return "ZeroIdeal";
    case Errc::TooLarge: return "TooLarge";
    case Errc::NonUnitGenerator: return "NonUnitGenerator";
    case Errc::ActionNotWellDefined: return "ActionNotWellDefined";
    case Errc::NotReducible: return "NotReducible";
    case Errc::ZeroExponent: return "ZeroExponent";
    case Errc::BadInput: return "BadInput";
  }
  return "UnknownError";
}

class QlatError : public std::runtime_error {
 public:
  QlatError(Errc c, const std::string& msg)
      : std::runtime_error(std::string(errc_name(c)) + ": " + msg), code_(c) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc c, const std::string& msg) {
  throw QlatError(c, msg);
}

}  // namespace qlat
