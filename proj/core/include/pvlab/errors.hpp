#pragma once

#include <stdexcept>
#include <string>

namespace pvlab {

enum class ErrorCode {
    InvalidParams,
    InvalidRegime,
    Underspecified,
    OverspecifiedInconsistent,
    NonZeroMean,
    InvalidResolution,
    SpaceMismatch,
    SolveFailure,
    SingularSystem,
    DenseModeUnavailable,
    EigenFailure,
    MissingTimeDerivative,
    UnsupportedSource,
    RegimeMismatch,
    NonPositiveSeries,
    UnresolvedRange,
    InsufficientBandwidth,
    ConfigError,
};

const char* to_string(ErrorCode code) noexcept;

/// Library exception. Every failure mode carries a code so callers (the CLI in
/// particular) can map it to an exit status without parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message);
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace pvlab
