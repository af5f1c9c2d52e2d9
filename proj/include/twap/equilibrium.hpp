#pragma once

#include "twap/model.hpp"
#include "twap/time_function.hpp"

namespace twap {

/// Inputs an equilibrium was solved from.
struct EquilibriumInputs {
    ModelParams params;
    TimeFunction kappa;
    TimeFunction gamma;
    TimeFunction mu1;
};

/// Coefficient functions of the TWAP equilibrium.
///
/// The price is S_t = g0(t) + g(t) a_Sigma + sigma_w(t) w_t + D_t and the
/// perceived drift of investor i is
///   mu0 a_Sigma + mu1 theta_i + mu2 a_i + mu3 w + mu4 w0 + mu5 theta_{i,-}.
/// sigma_w < 0 means that positive supply depresses the price.
struct EquilibriumSolution {
    EquilibriumInputs inputs;
    TimeFunction g0;
    TimeFunction g;
    TimeFunction sigma_w;
    TimeFunction mu0, mu2, mu3, mu4, mu5;

    int grid() const { return sigma_w.grid(); }
    const ModelParams& params() const { return inputs.params; }
    const TimeFunction& mu1() const { return inputs.mu1; }
};

/// Solves the equilibrium by quadrature of the closed-form coefficient
/// integrals. Throws SecondOrderViolation, GridMismatch,
/// QuadratureDivergence.
EquilibriumSolution solve(const ModelParams& params, const TimeFunction& kappa, const TimeFunction& gamma,
                          const TimeFunction& mu1);

/// sigma_w(t) = e^{pi (t-1)} phi1 - int_t^1 e^{pi (t-u)} (2 kappa - mu1) / M du
TimeFunction solve_sigma_w(const ModelParams& params, const TimeFunction& kappa, const TimeFunction& mu1);

/// Per-investor loadings of the optimal holdings
///   theta_i = load_w w + load_target (a_i - a_Sigma/M) + load_initial (theta_{i,-} - w0/M).
struct HoldingsProfile {
    TimeFunction load_w;
    TimeFunction load_target;
    TimeFunction load_initial;
};

HoldingsProfile holdings_profile(const EquilibriumSolution& sol);

struct Investor {
    double target;
    double initial;
};

Investor investor(const ModelParams& p, int i);

double holdings(const EquilibriumSolution& sol, const Investor& who, double w, double t);
double holdings(const EquilibriumSolution& sol, int i, double w, double t);

/// Equilibrium drift of the price; the same for every investor.
double drift(const EquilibriumSolution& sol, double w, double t);

/// Drift perceived by one investor holding `theta`, from the pricing coefficients.
double perceived_drift(const EquilibriumSolution& sol, const Investor& who, double theta, double w, double t);

double price(const EquilibriumSolution& sol, double w, double dividend, double t);

/// a_Sigma recovered from the opening price. Throws DomainError when g(0) = 0.
double infer_imbalance(const EquilibriumSolution& sol, double opening_price);

/// Average over investors of theta_i - theta_{i,-} - gamma (a_i - theta_{i,-}).
double average_deviation(const EquilibriumSolution& sol, double w, double t);

struct SupplyMoments {
    double mean;
    double variance;
};

/// Moments of w_t given w0.
SupplyMoments supply_moments(const ModelParams& p, double t);

/// E[mu_t | a_Sigma] on the grid.
TimeFunction expected_drift_profile(const EquilibriumSolution& sol);

/// Conditional variance sigma_w(t)^2 V[w_t] of the liquidity premium.
TimeFunction premium_variance(const EquilibriumSolution& sol);

/// Pointwise comparison of sigma_w between two solutions on the same grid.
struct SigmaOrdering {
    double min_diff; ///< min_k (b - a)
    double max_diff; ///< max_k (b - a)

    bool nondecreasing(double tol = 1e-12) const { return min_diff >= -tol; }
    bool nonincreasing(double tol = 1e-12) const { return max_diff <= tol; }
};

SigmaOrdering compare_sigma_w(const EquilibriumSolution& a, const EquilibriumSolution& b);

/// Monotonicity of sigma_w under small upward bumps of each input.
struct ComparativeStatics {
    bool increasing_in_mu1;
    bool increasing_in_investors;
    bool decreasing_in_kappa;
    bool increasing_in_pi;
    bool nonpositive;
    TimeFunction premium_variance;
};

ComparativeStatics comparative_statics(const EquilibriumSolution& sol, double bump = 0.05);

} // namespace twap
