#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace twap {

enum class ErrorCode {
    InvalidArgument,
    SecondOrderViolation,
    QuadratureDivergence,
    WelfareNonexistence,
    VayanosTooFewInvestors,
    IntegrationOverflow,
    RestrictionViolation,
    InfeasibleCalibration,
    NonzeroPi,
    DomainError,
    RiccatiExplosion,
    GridMismatch,
    MissingPenalty,
    ConfigError,
};

/// Stable machine-readable name, used verbatim on the CLI's stderr.
std::string_view error_name(ErrorCode code) noexcept;

/// True for failures of the numerics rather than of the inputs.
bool is_numerical(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// Raised when an integration diverges; carries the time at which it happened.
class ExplosionError : public Error {
public:
    ExplosionError(double time, const std::string& what)
        : Error(ErrorCode::RiccatiExplosion, what), time_(time) {}

    double blow_up_time() const noexcept { return time_; }

private:
    double time_;
};

/// Raised by calibration; carries the largest shortfall of the slope.
class CalibrationError : public Error {
public:
    CalibrationError(double worst_time, double shortfall, const std::string& what)
        : Error(ErrorCode::InfeasibleCalibration, what), worst_time_(worst_time), shortfall_(shortfall) {}

    double worst_time() const noexcept { return worst_time_; }
    double shortfall() const noexcept { return shortfall_; }

private:
    double worst_time_;
    double shortfall_;
};

} // namespace twap
