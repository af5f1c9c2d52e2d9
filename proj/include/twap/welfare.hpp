#pragma once

#include "twap/equilibrium.hpp"
#include "twap/model.hpp"

#include <array>
#include <utility>

namespace twap {

/// Coefficients of the quadratic value function
///   X - L - (b0 + b1 a_i^2 + b2 a_i a_S + b3 a_S^2 + b4 w^2 + b5 w a_i
///            + b6 a_S w + b7 w + b8 a_i + b9 a_S).
/// b0, b7, b8 and b9 depend on the investor's initial holding.
struct BetaSystem {
    std::array<TimeFunction, 10> beta;
    double theta_initial = 0.0;

    const TimeFunction& operator[](std::size_t j) const { return beta[j]; }
};

/// Backward RK4 solve of the ten linear coefficient ODEs with zero terminal
/// values. Throws IntegrationOverflow if the solution is not finite.
BetaSystem solve_betas(const ModelParams& params, const TimeFunction& kappa, const TimeFunction& gamma,
                       const TimeFunction& mu1, double theta_initial);

/// CE_i for the realized targets of investor i.
double certainty_equivalent(const BetaSystem& betas, const EquilibriumSolution& sol, int i);

/// sum_i E[CE_i] over the target moments, value-function route.
double expected_welfare(const ModelParams& params, const TimeFunction& kappa, const TimeFunction& gamma,
                        const TimeFunction& mu1);

struct WelfareReport {
    double initial_wealth; ///< E[S0] w0
    double trading_profit; ///< int_0^1 E[w mu] dt
    double penalty;        ///< sum_i E[L_{i,1}]
    double total;
};

/// Expected welfare split into wealth, trading profit and penalty from the
/// supply moments. Needs pi = 0, theta_{i,-} = w0/M and phi0 = phi1 = 0,
/// otherwise throws RestrictionViolation.
WelfareReport welfare_decomposition(const ModelParams& params, const TimeFunction& kappa,
                                    const TimeFunction& gamma, const TimeFunction& mu1);

/// f(mu1,t) - f(0,t) and h(mu1,t) - h(0,t): the wealth and penalty changes
/// relative to mu1 = 0.
std::pair<TimeFunction, TimeFunction> welfare_gap(const TimeFunction& mu1, const ModelParams& params,
                                                  const TimeFunction& kappa, const TimeFunction& gamma);

} // namespace twap
