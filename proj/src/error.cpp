#include "anilap/error.hpp"

namespace anilap {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::SobolevExponentUndefined: return "SobolevExponentUndefined";
    case ErrorCode::InvalidRadius: return "InvalidRadius";
    case ErrorCode::InvalidIndex: return "InvalidIndex";
    case ErrorCode::SingularPoint: return "SingularPoint";
    case ErrorCode::IntegrabilityFailure: return "IntegrabilityFailure";
    case ErrorCode::InvalidQuery: return "InvalidQuery";
    case ErrorCode::BoundaryStencilError: return "BoundaryStencilError";
    case ErrorCode::SpectralPathUnavailable: return "SpectralPathUnavailable";
    case ErrorCode::OrderFitUnreliable: return "OrderFitUnreliable";
    case ErrorCode::QuadratureResolutionError: return "QuadratureResolutionError";
    case ErrorCode::SupportViolation: return "SupportViolation";
    case ErrorCode::WindowError: return "WindowError";
    case ErrorCode::SolveFailure: return "SolveFailure";
    case ErrorCode::ExponentFitUnreliable: return "ExponentFitUnreliable";
    case ErrorCode::PreconditionViolation: return "PreconditionViolation";
    case ErrorCode::FitUnreliable: return "FitUnreliable";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    }
    return "UnknownError";
}

} // namespace anilap
