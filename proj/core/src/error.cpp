// error.cpp — error kinds raised by the cbec toolkit
#include "cbec/error.hpp"

namespace cbec {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::NonConvergence: return "NonConvergence";
    case ErrorKind::NonDiagonalizable: return "NonDiagonalizable";
    case ErrorKind::DegenerateLeadingCoefficient: return "DegenerateLeadingCoefficient";
    case ErrorKind::SingularPencil: return "SingularPencil";
    case ErrorKind::StepUnderflow: return "StepUnderflow";
    case ErrorKind::RootFindingFailure: return "RootFindingFailure";
    case ErrorKind::NonvanishingLinearTerm: return "NonvanishingLinearTerm";
    case ErrorKind::DegenerateDenominator: return "DegenerateDenominator";
    case ErrorKind::DimensionBudgetExceeded: return "DimensionBudgetExceeded";
    case ErrorKind::ConfigParseError: return "ConfigParseError";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, std::string module, const std::string& message)
    : std::runtime_error("[" + module + "] " + to_string(kind) + ": " + message),
      kind_(kind),
      module_(std::move(module)) {}

}  // namespace cbec
