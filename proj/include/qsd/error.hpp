#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qsd {

enum class ErrorCode {
    NotHermitian,
    NotPsd,
    GramMismatch,
    DimensionMismatch,
    IndexOutOfRange,
    InvalidArgument,
    ZeroProbabilityOutcome,
    LabelMismatch,
    NotUnambiguous,
    OverlapConstraintViolated,
    AmplitudeOutOfRange,
    GammaOutOfRange,
    InvalidGamma,
    GramNotPsd,
    ParamOutOfRange,
    InfeasibleAmplitudes,
    Infeasible,
    HypothesisViolated,
    EmptyGrid,
};

constexpr std::string_view code_name(ErrorCode code) {
    switch (code) {
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::NotPsd: return "NotPsd";
    case ErrorCode::GramMismatch: return "GramMismatch";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ZeroProbabilityOutcome: return "ZeroProbabilityOutcome";
    case ErrorCode::LabelMismatch: return "LabelMismatch";
    case ErrorCode::NotUnambiguous: return "NotUnambiguous";
    case ErrorCode::OverlapConstraintViolated: return "OverlapConstraintViolated";
    case ErrorCode::AmplitudeOutOfRange: return "AmplitudeOutOfRange";
    case ErrorCode::GammaOutOfRange: return "GammaOutOfRange";
    case ErrorCode::InvalidGamma: return "InvalidGamma";
    case ErrorCode::GramNotPsd: return "GramNotPsd";
    case ErrorCode::ParamOutOfRange: return "ParamOutOfRange";
    case ErrorCode::InfeasibleAmplitudes: return "InfeasibleAmplitudes";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::HypothesisViolated: return "HypothesisViolated";
    case ErrorCode::EmptyGrid: return "EmptyGrid";
    }
    return "Unknown";
}

/// Domain error raised by every qsd operation. `code()` is stable and
/// machine-readable; `what()` carries a human-readable detail.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& detail)
        : std::runtime_error(std::string(code_name(code)) + ": " + detail), code_(code), detail_(detail) {}

    ErrorCode code() const noexcept { return code_; }
    std::string_view name() const noexcept { return code_name(code_); }
    const std::string& detail() const noexcept { return detail_; }

private:
    ErrorCode code_;
    std::string detail_;
};

} // namespace qsd
