#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace anilap {

enum class ErrorCode {
    SobolevExponentUndefined,
    InvalidRadius,
    InvalidIndex,
    SingularPoint,
    IntegrabilityFailure,
    InvalidQuery,
    BoundaryStencilError,
    SpectralPathUnavailable,
    OrderFitUnreliable,
    QuadratureResolutionError,
    SupportViolation,
    WindowError,
    SolveFailure,
    ExponentFitUnreliable,
    PreconditionViolation,
    FitUnreliable,
    ConfigError,
    IoError,
    InvalidArgument,
};

[[nodiscard]] std::string_view to_string(ErrorCode code) noexcept;

/// Library exception. The code names the failure mode; the message carries
/// the offending values.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace anilap
