#include "nuedge/error.hpp"

namespace nuedge {

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::ContractViolation: return "contract violation";
        case ErrorKind::DegreeOverflow: return "degree overflow";
        case ErrorKind::DegenerateVariance: return "degenerate variance";
        case ErrorKind::IllConditioned: return "ill-conditioned";
        case ErrorKind::SpectralGapFailure: return "spectral gap failure";
        case ErrorKind::NoGeometricRegime: return "no geometric regime";
        case ErrorKind::InvalidBlockScale: return "invalid block scale";
        case ErrorKind::NotApplicable: return "not applicable";
        case ErrorKind::AccuracyError: return "accuracy error";
        case ErrorKind::CapacityError: return "capacity error";
        case ErrorKind::EnvelopeMisfit: return "envelope misfit";
        case ErrorKind::ParseError: return "parse error";
    }
    return "unknown error";
}

}  // namespace nuedge
