#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace chainlp {

enum class ErrorCode {
    EmptyInstance,
    DimensionMismatch,
    NonPositiveBound,
    UnsortedBounds,
    NonPositiveWeight,
    NegativeBudget,
    NonPositiveCost,
    IndexOutOfRange,
    NonMonotoneProfile,
    InfeasibleProfile,
    BudgetExceeded,
    NoCandidate,
    TooLarge,
    TooFewAgents,
    NotInterior,
    DidNotConverge,
    InvalidArgument,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::EmptyInstance: return "EmptyInstance";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonPositiveBound: return "NonPositiveBound";
    case ErrorCode::UnsortedBounds: return "UnsortedBounds";
    case ErrorCode::NonPositiveWeight: return "NonPositiveWeight";
    case ErrorCode::NegativeBudget: return "NegativeBudget";
    case ErrorCode::NonPositiveCost: return "NonPositiveCost";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::NonMonotoneProfile: return "NonMonotoneProfile";
    case ErrorCode::InfeasibleProfile: return "InfeasibleProfile";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::NoCandidate: return "NoCandidate";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::TooFewAgents: return "TooFewAgents";
    case ErrorCode::NotInterior: return "NotInterior";
    case ErrorCode::DidNotConverge: return "DidNotConverge";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so
/// callers (the CLI in particular) can map it without string matching.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// True for the codes that mean "the input instance is malformed".
constexpr bool is_validation_error(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::EmptyInstance:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::NonPositiveBound:
    case ErrorCode::UnsortedBounds:
    case ErrorCode::NonPositiveWeight:
    case ErrorCode::NegativeBudget:
    case ErrorCode::NonPositiveCost:
    case ErrorCode::TooFewAgents:
    case ErrorCode::InvalidArgument:
        return true;
    default:
        return false;
    }
}

} // namespace chainlp
