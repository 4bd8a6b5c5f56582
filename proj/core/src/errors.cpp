#include "msteer/errors.hpp"

#include <iostream>

namespace msteer {

const char* to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::OrderMismatch: return "OrderMismatch";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::EmptyEnsemble: return "EmptyEnsemble";
    case ErrorCode::UnsupportedFamily: return "UnsupportedFamily";
    case ErrorCode::WeightSumInvalid: return "WeightSumInvalid";
    case ErrorCode::OutOfSupport: return "OutOfSupport";
    case ErrorCode::NoFeasibleStart: return "NoFeasibleStart";
    case ErrorCode::ControlInfeasible: return "ControlInfeasible";
    case ErrorCode::RetryBudgetExceeded: return "RetryBudgetExceeded";
    case ErrorCode::SigmaNotPD: return "SigmaNotPD";
    case ErrorCode::NotInteriorPoint: return "NotInteriorPoint";
    case ErrorCode::LineSearchStalled: return "LineSearchStalled";
    case ErrorCode::MaxIterations: return "MaxIterations";
    case ErrorCode::MomentsInfeasible: return "MomentsInfeasible";
    case ErrorCode::EntropyOrderViolated: return "EntropyOrderViolated";
    case ErrorCode::UnboundedRatio: return "UnboundedRatio";
    case ErrorCode::AcceptanceStalled: return "AcceptanceStalled";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::IoError: return "IoError";
    }
    return "UnknownError";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

namespace {
WarningHandler g_warning_handler;
}

void set_warning_handler(WarningHandler handler) { g_warning_handler = std::move(handler); }

void warn(const std::string& message) {
    if (g_warning_handler) {
        g_warning_handler(message);
    } else {
        std::cerr << "warning: " << message << "\n";
    }
}

} // namespace msteer
