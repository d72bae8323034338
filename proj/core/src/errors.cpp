#include "meps/errors.hpp"

namespace meps {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "InvalidArgument";
    case ErrorKind::kNonZeroMeanSource: return "NonZeroMeanSource";
    case ErrorKind::kValidationFailed: return "ValidationFailed";
    case ErrorKind::kBlowUp: return "BlowUp";
    case ErrorKind::kNegativeConcentration: return "NegativeConcentration";
    case ErrorKind::kInfeasibleKineticTerm: return "InfeasibleKineticTerm";
    case ErrorKind::kSingularMatrix: return "SingularMatrix";
    case ErrorKind::kInfeasibleCertificate: return "InfeasibleCertificate";
    case ErrorKind::kHypothesisFailed: return "HypothesisFailed";
    case ErrorKind::kInadmissibleConfig: return "InadmissibleConfig";
    case ErrorKind::kFormat: return "FormatError";
  }
  return "Unknown";
}

}  // namespace meps
