#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sheath {

/// Failure categories raised across the library. The CLI maps these onto
/// exit codes: rejected preconditions exit 2, numerical failures exit 3.
enum class ErrorKind {
  InvalidArgument,
  BranchExhausted,
  RefusedNoSheath,
  WrongRegime,
  Config,
  NumericalBranchFailure,
  WindowTooShort,
  NoConvergence,
  NonFinite,
  CharacteristicViolation,
  FitUnderdetermined,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::BranchExhausted: return "BranchExhausted";
    case ErrorKind::RefusedNoSheath: return "RefusedNoSheath";
    case ErrorKind::WrongRegime: return "WrongRegime";
    case ErrorKind::Config: return "ConfigError";
    case ErrorKind::NumericalBranchFailure: return "NumericalBranchFailure";
    case ErrorKind::WindowTooShort: return "WindowTooShort";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::CharacteristicViolation: return "CharacteristicViolation";
    case ErrorKind::FitUnderdetermined: return "FitUnderdetermined";
  }
  return "Unknown";
}

/// True for errors that reject the caller's input rather than signal a
/// breakdown of a numerical procedure.
constexpr bool is_precondition(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument:
    case ErrorKind::BranchExhausted:
    case ErrorKind::RefusedNoSheath:
    case ErrorKind::WrongRegime:
    case ErrorKind::Config:
      return true;
    default:
      return false;
  }
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool condition, ErrorKind kind, const std::string& what) {
  if (!condition) fail(kind, what);
}

}  // namespace sheath
