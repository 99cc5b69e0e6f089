#include "cvtf/error.hpp"

namespace cvtf {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::NegativeEntry: return "NegativeEntry";
    case ErrorKind::NotNormalized: return "NotNormalized";
    case ErrorKind::DimensionTooSmall: return "DimensionTooSmall";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::ToleranceUnreachable: return "ToleranceUnreachable";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::SingularSum: return "SingularSum";
    case ErrorKind::RegimeViolation: return "RegimeViolation";
    case ErrorKind::Infeasible: return "Infeasible";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace cvtf
