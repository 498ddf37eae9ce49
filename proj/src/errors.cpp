#include "chemsens/errors.hpp"

namespace chemsens {

const char* to_string(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::InvalidParam: return "InvalidParam";
    case ErrorKind::TrustRadiusExceeded: return "TrustRadiusExceeded";
    case ErrorKind::GapTooSmall: return "GapTooSmall";
    case ErrorKind::BranchAmbiguous: return "BranchAmbiguous";
    case ErrorKind::PropagationOverflow: return "PropagationOverflow";
    case ErrorKind::DifferentiationUnstable: return "DifferentiationUnstable";
    case ErrorKind::FitResidualExceeded: return "FitResidualExceeded";
    case ErrorKind::DegenerateAbsorption: return "DegenerateAbsorption";
    case ErrorKind::DegenerateSignal: return "DegenerateSignal";
    case ErrorKind::SingularCovariance: return "SingularCovariance";
    case ErrorKind::QuadratureNotConverged: return "QuadratureNotConverged";
    case ErrorKind::InsufficientStatistics: return "InsufficientStatistics";
    case ErrorKind::StencilUnstable: return "StencilUnstable";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::UsageError: return "UsageError";
    }
    return "Unknown";
}

} // namespace chemsens
