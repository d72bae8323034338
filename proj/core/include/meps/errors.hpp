#pragma once

#include <stdexcept>
#include <string>

namespace meps {

enum class ErrorKind {
  kInvalidArgument,
  kNonZeroMeanSource,
  kValidationFailed,
  kBlowUp,
  kNegativeConcentration,
  kInfeasibleKineticTerm,
  kSingularMatrix,
  kInfeasibleCertificate,
  kHypothesisFailed,
  kInadmissibleConfig,
  kFormat,
};

const char* to_string(ErrorKind kind) noexcept;

/// Single exception type for the library; `kind()` drives CLI exit codes.
class MepsError : public std::runtime_error {
 public:
  MepsError(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind), detail_(message) {}

  ErrorKind kind() const noexcept { return kind_; }
  /// The message without the kind prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

}  // namespace meps
