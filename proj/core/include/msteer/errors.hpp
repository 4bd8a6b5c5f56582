#pragma once

#include <functional>
#include <stdexcept>
#include <string>

namespace msteer {

// Every failure the library can signal.  Thrown wrapped in Error; the CLI
// maps each group to a distinct process exit code (see runner.hpp).
enum class ErrorCode {
    // domain misuse
    OrderMismatch,
    LengthMismatch,
    EmptyEnsemble,
    UnsupportedFamily,
    WeightSumInvalid,
    OutOfSupport,
    // planning
    NoFeasibleStart,
    ControlInfeasible,
    RetryBudgetExceeded,
    // density realization
    SigmaNotPD,
    NotInteriorPoint,
    LineSearchStalled,
    MaxIterations,
    // entropy diagnostics
    MomentsInfeasible,
    EntropyOrderViolated,
    // sampling
    UnboundedRatio,
    AcceptanceStalled,
    // configuration and I/O
    ParseError,
    ValidationError,
    IoError,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& message);
    ErrorCode code() const { return code_; }

  private:
    ErrorCode code_;
};

// Non-fatal diagnostics (e.g. low acceptance rates) go through here.
// Default handler writes to stderr; tests may swap it out.  Passing an
// empty function restores the default.
using WarningHandler = std::function<void(const std::string&)>;
void set_warning_handler(WarningHandler handler);
void warn(const std::string& message);

} // namespace msteer
