// error.hpp — error kinds raised by the cbec toolkit
#pragma once

#include <stdexcept>
#include <string>

namespace cbec {

enum class ErrorKind {
  InvalidArgument,
  NonConvergence,
  NonDiagonalizable,
  DegenerateLeadingCoefficient,
  SingularPencil,
  StepUnderflow,
  RootFindingFailure,
  NonvanishingLinearTerm,
  DegenerateDenominator,
  DimensionBudgetExceeded,
  ConfigParseError,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string module, const std::string& message);

  ErrorKind kind() const { return kind_; }
  const std::string& module() const { return module_; }

 private:
  ErrorKind kind_;
  std::string module_;
};

}  // namespace cbec
