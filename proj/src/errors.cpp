#include "hurwitz/errors.hpp"

namespace hurwitz {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::NonConvergence: return "NonConvergence";
        case ErrorKind::LatticePoint: return "LatticePoint";
        case ErrorKind::ContourClash: return "ContourClash";
        case ErrorKind::CountMismatch: return "CountMismatch";
        case ErrorKind::OnBoundary: return "OnBoundary";
        case ErrorKind::CommonRoot: return "CommonRoot";
        case ErrorKind::NearPole: return "NearPole";
        case ErrorKind::Coincident: return "Coincident";
        case ErrorKind::IllConditioned: return "IllConditioned";
        case ErrorKind::StepUnderflow: return "StepUnderflow";
        case ErrorKind::SlopeUnstable: return "SlopeUnstable";
        case ErrorKind::InvalidInput: return "InvalidInput";
    }
    return "Unknown";
}

}  // namespace hurwitz
