#include "pvlab/errors.hpp"

namespace pvlab {

const char* to_string(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::InvalidRegime: return "InvalidRegime";
    case ErrorCode::Underspecified: return "Underspecified";
    case ErrorCode::OverspecifiedInconsistent: return "OverspecifiedInconsistent";
    case ErrorCode::NonZeroMean: return "NonZeroMean";
    case ErrorCode::InvalidResolution: return "InvalidResolution";
    case ErrorCode::SpaceMismatch: return "SpaceMismatch";
    case ErrorCode::SolveFailure: return "SolveFailure";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::DenseModeUnavailable: return "DenseModeUnavailable";
    case ErrorCode::EigenFailure: return "EigenFailure";
    case ErrorCode::MissingTimeDerivative: return "MissingTimeDerivative";
    case ErrorCode::UnsupportedSource: return "UnsupportedSource";
    case ErrorCode::RegimeMismatch: return "RegimeMismatch";
    case ErrorCode::NonPositiveSeries: return "NonPositiveSeries";
    case ErrorCode::UnresolvedRange: return "UnresolvedRange";
    case ErrorCode::InsufficientBandwidth: return "InsufficientBandwidth";
    case ErrorCode::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code)
{
}

} // namespace pvlab
