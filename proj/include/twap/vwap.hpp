#pragma once

#include "twap/model.hpp"
#include "twap/rng.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace twap {

/// Stochastic-target market: the target ratio is a gamma bridge and the
/// supply is w_t + rho a_Sigma gamma_{t-}. Requires theta_{i,-} = w0 = 0.
struct VwapParams {
    ModelParams base;
    double rho = 0.0;

    void validate() const;
};

struct Psi {
    double psi0;
    double psi1;
};

/// psi0 = 1/(1-t), psi1 = 1/((1-t)(2-t)). Throws DomainError outside [0,1).
Psi psi(double t);

/// S_t = g0(t) + sigma_w(t) w_t + D_t + sigma_gamma(t) a_Sigma gamma_t, with
/// perceived drift mu1 theta + mu2 a_S gamma + mu3 w + mu4 a_i gamma.
/// g0 is evaluated at the realized a_Sigma of the parameters.
struct VwapSolution {
    VwapParams params;
    TimeFunction kappa;
    TimeFunction mu1;
    TimeFunction sigma_w;
    TimeFunction sigma_gamma;
    TimeFunction g0;
    TimeFunction mu2, mu3, mu4;

    int grid() const { return sigma_w.grid(); }
};

VwapSolution solve_vwap(const VwapParams& vp, const TimeFunction& kappa, const TimeFunction& mu1);

double vwap_holdings(const VwapSolution& sol, int i, double w, double gamma_prev, double t);

double vwap_drift(const VwapSolution& sol, double w, double gamma_prev, double t);

double vwap_perceived_drift(const VwapSolution& sol, int i, double theta, double w, double gamma_prev, double t);

double vwap_price(const VwapSolution& sol, double w, double dividend, double gamma, double t);

/// One bridge path on the N-grid: gamma_0 = 0, gamma_N = 1, increments
/// (1 - gamma_k) Beta(1/N, 1 - t_k - 1/N).
void gamma_bridge_path(StreamRng& rng, int n, std::span<double> out);

struct GammaBridgeSet {
    int grid = 0;
    std::vector<std::vector<double>> paths;
};

/// Bridge paths for stream ids 0..n_paths-1 of `seed`.
GammaBridgeSet simulate_gamma_bridge(int n, int n_paths, std::uint64_t seed);

/// Stream id reserved for the bridge of Monte Carlo path `path`.
std::uint64_t bridge_stream(std::uint64_t path);

} // namespace twap
