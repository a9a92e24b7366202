#include "wdecay/errors.hpp"

namespace wdecay {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyGrid: return "EmptyGrid";
    case ErrorCode::NonPositiveBound: return "NonPositiveBound";
    case ErrorCode::ChannelMismatch: return "ChannelMismatch";
    case ErrorCode::DimensionOverflow: return "DimensionOverflow";
    case ErrorCode::UnknownMode: return "UnknownMode";
    case ErrorCode::UnknownBlock: return "UnknownBlock";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::BadFamilyParams: return "BadFamilyParams";
    case ErrorCode::MissingDerivatives: return "MissingDerivatives";
    case ErrorCode::ThresholdViolated: return "ThresholdViolated";
    case ErrorCode::BadParameters: return "BadParameters";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::NoModesAboveCutoff: return "NoModesAboveCutoff";
    case ErrorCode::TooFewShells: return "TooFewShells";
    case ErrorCode::NotAnEigenpair: return "NotAnEigenpair";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

namespace {

std::string compose(ErrorCode code, const std::string& module, const std::string& operation,
                    const std::string& message) {
  return std::string(to_string(code)) + " [" + module + "::" + operation + "]: " + message;
}

}  // namespace

Error::Error(ErrorCode code, std::string module, std::string operation, const std::string& message)
    : std::runtime_error(compose(code, module, operation, message)),
      code_(code),
      module_(std::move(module)),
      operation_(std::move(operation)) {}

}  // namespace wdecay
