#pragma once

#include "twap/model.hpp"
#include "twap/time_function.hpp"

namespace twap {

/// Exponential utility -exp(-x/tau). Only alpha = 0, pi = 0, eta = 1 and
/// theta_{i,-} = w0/M are supported; the constructor throws
/// RestrictionViolation otherwise.
class ExpParams {
public:
    ExpParams(ModelParams base, double tau);

    const ModelParams& base() const noexcept { return base_; }
    double tau() const noexcept { return tau_; }

private:
    ModelParams base_;
    double tau_;
};

/// Value function exp(-(X-L)/tau + b0 + b1 a_i^2 + b2 a_i a_S + b3 a_S^2
///                    + b4 w^2 + b5 w a_i + b6 a_S w + b8 a_i)
/// together with the price coefficients.
struct RiccatiSolution {
    TimeFunction beta4, sigma_w;
    TimeFunction beta0, beta1, beta2, beta3, beta5, beta6, beta8;
    TimeFunction g, g0;
    TimeFunction mu0, mu2, mu3, mu4, mu5;
    TimeFunction kappa, gamma, mu1;
    bool exploded = false;
    double blow_up_time = 1.0;

    int grid() const { return sigma_w.grid(); }
};

/// One backward RK4 pass on an n-grid, without confirmation or the
/// second-order check. When the pass diverges only `exploded` and
/// `blow_up_time` are meaningful.
RiccatiSolution integrate_exp(const ExpParams& ep, const TimeFunction& kappa, const TimeFunction& gamma,
                              const TimeFunction& mu1, int n);

/// Solves on the grid of kappa. A divergence is re-checked at four times the
/// resolution; if it persists ExplosionError is thrown, otherwise the fine
/// solution is returned on the original grid. Throws SecondOrderViolation
/// when mu1 >= (1 + sigma_w^2)/(2 tau) + kappa somewhere.
RiccatiSolution solve_exp(const ExpParams& ep, const TimeFunction& kappa, const TimeFunction& gamma,
                          const TimeFunction& mu1);

/// Loading on a_i - a_S/M of the optimal holdings.
double exp_target_loading(const RiccatiSolution& sol, const ExpParams& ep, double t);

double exp_holdings(const RiccatiSolution& sol, const ExpParams& ep, int i, double w, double t);

double exp_drift(const RiccatiSolution& sol, const ExpParams& ep, double w, double t);

double exp_perceived_drift(const RiccatiSolution& sol, const ExpParams& ep, int i, double theta, double w,
                           double t);

} // namespace twap
