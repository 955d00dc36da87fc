#pragma once

#include <stdexcept>
#include <string>

namespace modeshift {

enum class ErrorCode {
  DivideByZeroTF,
  SingularMatrix,
  EvaluationAtPole,
  ImproperTF,
  BilinearSingularity,
  InvalidParams,
  SplitNotApplicable,
  ZeroVoltage,
  NonGfmDesign,
  NumericalDivergence,
  Validation,
  Parse,
  UnknownLoop,
  UnresolvablePath,
};

const char* to_string(ErrorCode c) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace modeshift
