#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace wdecay {

enum class ErrorCode {
  EmptyGrid,
  NonPositiveBound,
  ChannelMismatch,
  DimensionOverflow,
  UnknownMode,
  UnknownBlock,
  ShapeMismatch,
  BadFamilyParams,
  MissingDerivatives,
  ThresholdViolated,
  BadParameters,
  NoConvergence,
  NoModesAboveCutoff,
  TooFewShells,
  NotAnEigenpair,
  ParseError,
  ValidationError,
  IoError,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string module, std::string operation, const std::string& message);

  ErrorCode code() const { return code_; }
  const std::string& module() const { return module_; }
  const std::string& operation() const { return operation_; }

 private:
  ErrorCode code_;
  std::string module_;
  std::string operation_;
};

}  // namespace wdecay
