#pragma once

#include <stdexcept>
#include <string>

namespace nuedge {

enum class ErrorKind {
    ContractViolation,
    DegreeOverflow,
    DegenerateVariance,
    IllConditioned,
    SpectralGapFailure,
    NoGeometricRegime,
    InvalidBlockScale,
    NotApplicable,
    AccuracyError,
    CapacityError,
    EnvelopeMisfit,
    ParseError,
};

const char* to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library. `kind()` lets callers branch without
/// string matching; `estimate()` carries a numeric diagnostic when one exists
/// (e.g. the inversion error estimate of an AccuracyError).
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what, double estimate = 0.0)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what),
          kind_(kind), estimate_(estimate) {}

    ErrorKind kind() const noexcept { return kind_; }
    double estimate() const noexcept { return estimate_; }

private:
    ErrorKind kind_;
    double estimate_;
};

inline void require(bool cond, const std::string& what) {
    if (!cond) throw Error(ErrorKind::ContractViolation, what);
}

}  // namespace nuedge
