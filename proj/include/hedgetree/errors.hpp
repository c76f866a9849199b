#pragma once

#include <stdexcept>
#include <string>

namespace hedgetree {

// Stable machine-readable identifiers for everything a caller can get wrong.
// Engine bugs (violated internal invariants) use InternalError instead, so a
// thrown Error always means the *input* was bad, never the engine.
enum class ErrorCode {
    NonUniformDepth,
    ZeroWeight,
    WeightSum,
    TimeOutOfRange,
    Unbounded,
    DimensionTooLarge,
    NoInteriorPoint,
    NegativeClaim,
    NegativeProcess,
    NotSupermartingale,
    NotAStoppingTime,
    ParseError,
    ArbitrageDetected,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
          code_(code),
          message_(message) {}

    ErrorCode code() const { return code_; }

    // The human-readable part alone, without the code prefix what() carries.
    const std::string& message() const { return message_; }

  private:
    ErrorCode code_;
    std::string message_;
};

// A violated invariant that no input should be able to trigger.
class InternalError : public std::logic_error {
  public:
    explicit InternalError(const std::string& message)
        : std::logic_error("internal invariant violated: " + message) {}
};

}  // namespace hedgetree
