#pragma once

#include <stdexcept>
#include <string>

namespace chemsens {

enum class ErrorKind {
    ParseError,
    InvalidParam,
    TrustRadiusExceeded,
    GapTooSmall,
    BranchAmbiguous,
    PropagationOverflow,
    DifferentiationUnstable,
    FitResidualExceeded,
    DegenerateAbsorption,
    DegenerateSignal,
    SingularCovariance,
    QuadratureNotConverged,
    InsufficientStatistics,
    StencilUnstable,
    IoError,
    UsageError,
};

const char* to_string(ErrorKind kind);

// Every failure the library raises carries a machine-readable kind; the CLI
// maps UsageError to exit code 2 and everything else to 1.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& detail)
        : std::runtime_error(std::string(to_string(kind)) + ": " + detail), kind_(kind), detail_(detail) {}

    ErrorKind kind() const noexcept { return kind_; }
    const std::string& detail() const noexcept { return detail_; }

private:
    ErrorKind kind_;
    std::string detail_;
};

} // namespace chemsens
