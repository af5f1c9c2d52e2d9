#pragma once

#include "twap/time_function.hpp"

#include <optional>
#include <string_view>
#include <variant>
#include <vector>

namespace twap {

/// Ex-ante moments of the private targets, used for expected welfare.
struct TargetMoments {
    std::vector<double> mean;   ///< E[a_i]
    std::vector<double> second; ///< E[a_i^2]
    double aggregate_second = 0.0; ///< E[a_Sigma^2]

    double aggregate_mean() const;
    double sum_second() const;
    /// E[a_Sigma^2] - M sum_i E[a_i^2]
    double dispersion() const;

    /// Independent targets sharing one mean and second moment.
    static TargetMoments iid(int investors, double mean, double second);
};

struct ModelParams {
    int investors = 1;
    double w0 = 0.0;     ///< initial noise-trader supply
    double alpha = 0.0;  ///< supply drift
    double pi = 0.0;     ///< supply mean reversion
    double eta = 0.0;    ///< supply volatility
    double phi0 = 0.0;   ///< terminal price loading on a_Sigma
    double phi1 = 0.0;   ///< terminal price loading on w_1
    double D0 = 0.0;
    std::vector<double> targets;          ///< realized a_i
    std::vector<double> initial_holdings; ///< theta_{i,-}, sums to w0
    std::vector<double> initial_cash;     ///< bond holdings, empty means zero
    TargetMoments moments;

    double target_imbalance() const;
    double cash(int i) const;

    /// Throws InvalidArgument when a field is inconsistent.
    void validate() const;

    /// Ten investors sharing ten shares, supply drifting down one share per
    /// day with unit volatility, dividend level 20. Targets are mean zero
    /// with unit variance; the realized targets are zero.
    static ModelParams reference_day();
};

enum class PenaltyProfile { Constant, Linear, PowerTail, Piecewise };

std::string_view profile_name(PenaltyProfile p);

/// Built-in penalty severities:
///   Constant   1
///   Linear     1 + t
///   PowerTail  9/8 (1-t)^-1/4
///   Piecewise  2e-4 up to 0.75, 2.3791 + 11.8954 (t - 0.95) up to 0.95, then PowerTail
TimeFunction builtin_kappa(PenaltyProfile profile, int n);

/// gamma(t) = level + slope t
TimeFunction linear_target_ratio(double level, double slope, int n);

/// Estimated price-impact curve lambda(t) of the signed order flow. The slope
/// is taken from `slope` when present, else by finite differences.
struct LambdaCurve {
    TimeFunction lambda;
    std::optional<TimeFunction> slope;
};

namespace selector {
struct Radner {};
struct Vayanos {};
struct WelfareMax {};
struct Custom {
    TimeFunction mu1;
};
struct Calibrated {
    LambdaCurve curve;
};
} // namespace selector

using EquilibriumSelector = std::variant<selector::Radner, selector::Vayanos, selector::WelfareMax,
                                         selector::Custom, selector::Calibrated>;

std::string_view selector_name(const EquilibriumSelector& s);

enum class SecondOrderCheck { Linear, Deferred };

/// The price-impact function mu1 picked out by a selector.
///
/// Throws SecondOrderViolation, WelfareNonexistence, VayanosTooFewInvestors,
/// RestrictionViolation (welfare maximizer outside pi = 0, theta = w0/M,
/// phi0 = phi1 = 0) and the calibration errors.
TimeFunction resolve_mu1(const EquilibriumSelector& sel, const ModelParams& params, const TimeFunction& kappa,
                         const TimeFunction& gamma, SecondOrderCheck check = SecondOrderCheck::Linear);

/// Root y of c1 y^3 - gamma (c1 y^2 + c2) on (gamma, 2 gamma) with
/// c2 = t (eta^2 + alpha^2 t + alpha w0). Returns gamma when gamma = 0 or t = 0.
double welfare_cubic_root(double gamma, double t, const ModelParams& params);

/// mu1*(t) / kappa(t) for the welfare maximizer; independent of kappa.
double welfare_ratio(double gamma, double t, const ModelParams& params);

/// Throws WelfareNonexistence unless the existence conditions hold on (0,1].
void check_welfare_conditions(const ModelParams& params, const TimeFunction& gamma);

/// Throws SecondOrderViolation at the first grid node with mu1 >= kappa.
void check_second_order(const TimeFunction& kappa, const TimeFunction& mu1);

/// Trapezoid estimate of int_0^1 (kappa^2 + mu1^2) dt. Throws
/// QuadratureDivergence when the tail makes it infinite.
double square_integral(const TimeFunction& kappa, const TimeFunction& mu1);

} // namespace twap
