#include "twap/errors.hpp"

namespace twap {

std::string_view error_name(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::SecondOrderViolation: return "SecondOrderViolation";
    case ErrorCode::QuadratureDivergence: return "QuadratureDivergence";
    case ErrorCode::WelfareNonexistence: return "WelfareNonexistence";
    case ErrorCode::VayanosTooFewInvestors: return "VayanosTooFewInvestors";
    case ErrorCode::IntegrationOverflow: return "IntegrationOverflow";
    case ErrorCode::RestrictionViolation: return "RestrictionViolation";
    case ErrorCode::InfeasibleCalibration: return "InfeasibleCalibration";
    case ErrorCode::NonzeroPi: return "NonzeroPi";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::RiccatiExplosion: return "RiccatiExplosion";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::MissingPenalty: return "MissingPenalty";
    case ErrorCode::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

bool is_numerical(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::QuadratureDivergence:
    case ErrorCode::IntegrationOverflow:
    case ErrorCode::RiccatiExplosion:
        return true;
    default:
        return false;
    }
}

} // namespace twap
