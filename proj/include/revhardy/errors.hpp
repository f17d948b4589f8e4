#pragma once

// Error kinds shared by every module. All failures are reported by throwing
// revhardy::Error; the kind lets callers (the CLI in particular) map a failure
// onto a verdict or an exit code without parsing messages.

#include <stdexcept>
#include <string>
#include <string_view>

namespace revhardy {

enum class ErrorKind {
  NonConvergent,
  DivergentIntegral,
  InvalidExponents,
  InadmissibleWeights,
  InadmissibleExponent,
  InadmissibleTail,
  BalanceViolated,
  InvalidParams,
  DegenerateSampler,
  ConfigError,
};

constexpr std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::NonConvergent: return "NonConvergent";
    case ErrorKind::DivergentIntegral: return "DivergentIntegral";
    case ErrorKind::InvalidExponents: return "InvalidExponents";
    case ErrorKind::InadmissibleWeights: return "InadmissibleWeights";
    case ErrorKind::InadmissibleExponent: return "InadmissibleExponent";
    case ErrorKind::InadmissibleTail: return "InadmissibleTail";
    case ErrorKind::BalanceViolated: return "BalanceViolated";
    case ErrorKind::InvalidParams: return "InvalidParams";
    case ErrorKind::DegenerateSampler: return "DegenerateSampler";
    case ErrorKind::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  /// True for failures that describe the mathematical input (bad exponents,
  /// violated hypotheses) rather than the numerics.
  bool is_parameter_error() const noexcept {
    switch (kind_) {
      case ErrorKind::InvalidExponents:
      case ErrorKind::InadmissibleWeights:
      case ErrorKind::InadmissibleExponent:
      case ErrorKind::InadmissibleTail:
      case ErrorKind::BalanceViolated:
      case ErrorKind::InvalidParams:
      case ErrorKind::ConfigError:
        return true;
      default:
        return false;
    }
  }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace revhardy
