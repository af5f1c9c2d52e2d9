#include "twap/vwap.hpp"

#include "twap/equilibrium.hpp"
#include "twap/errors.hpp"
#include "twap/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace twap {

void VwapParams::validate() const
{
    base.validate();
    if (base.w0 != 0.0)
        throw Error(ErrorCode::RestrictionViolation, "stochastic-target market needs w0 = 0");
    for (double h : base.initial_holdings)
        if (h != 0.0)
            throw Error(ErrorCode::RestrictionViolation, "stochastic-target market needs zero initial holdings");
}

Psi psi(double t)
{
    if (!(t >= 0.0 && t < 1.0))
        throw Error(ErrorCode::DomainError, "psi is defined on [0,1)");
    const double r = 1.0 - t;
    return {1.0 / r, 1.0 / (r * (2.0 - t))};
}

VwapSolution solve_vwap(const VwapParams& vp, const TimeFunction& kappa, const TimeFunction& mu1)
{
    vp.validate();
    check_second_order(kappa, mu1);
    square_integral(kappa, mu1);

    const auto& p = vp.base;
    const int n = kappa.grid();
    const double M = p.investors;
    const double rho = vp.rho;
    const double as = p.target_imbalance();
    const double tail = std::max(kappa.tail_exponent(), mu1.tail_exponent());

    TimeFunction sigma_w = solve_sigma_w(p, kappa, mu1);

    std::vector<double> weighted(n + 1), forcing(n + 1);
    for (int k = 0; k <= n; ++k) {
        forcing[k] = (2.0 * kappa[k] * (1.0 - rho) + mu1[k] * rho) / M;
        weighted[k] = static_cast<double>(n - k) / n * forcing[k];
    }
    const auto wint = quad::tail_integrals(weighted, tail);
    std::vector<double> sg(n + 1), intensity(n + 1);
    for (int k = 0; k < n; ++k) {
        const double rem = static_cast<double>(n - k) / n;
        sg[k] = wint[k] / rem;
        intensity[k] = sg[k] / rem;
    }
    sg[n] = 0.0;
    intensity[n] = 0.5 * forcing[n];

    const auto int_intensity = quad::tail_integrals(intensity, tail);
    const auto int_sigma_w = quad::tail_integrals(sigma_w.values());
    std::vector<double> g0(n + 1);
    for (int k = 0; k <= n; ++k)
        g0[k] = p.phi0 * as + as * int_intensity[k] + p.alpha * int_sigma_w[k];

    std::vector<double> m2(n + 1), m3(n + 1), m4(n + 1);
    for (int k = 0; k <= n; ++k) {
        const double kap = kappa[k];
        const double m = mu1[k];
        const double den = 2.0 * kap - m;
        m2[k] = 2.0 * (kap - m) * (2.0 * kap * (rho - 1.0) - m * rho) / (M * den);
        m3[k] = 2.0 * (kap - m) / M;
        m4[k] = -2.0 * kap * m / den;
    }
    const bool sing = kappa.singular_at_one();
    const double pe = kappa.tail_exponent();
    return {vp,
            kappa,
            mu1,
            std::move(sigma_w),
            TimeFunction::sampled(std::move(sg)),
            TimeFunction::sampled(std::move(g0)),
            TimeFunction::sampled(std::move(m2), sing, pe),
            TimeFunction::sampled(std::move(m3), sing, pe),
            TimeFunction::sampled(std::move(m4), sing, pe)};
}

double vwap_holdings(const VwapSolution& sol, int i, double w, double gamma_prev, double t)
{
    const auto& p = sol.params.base;
    const double M = p.investors;
    const double as = p.target_imbalance();
    const double kap = sol.kappa(t);
    const double m = sol.mu1(t);
    const double a = investor(p, i).target;
    return w / M + gamma_prev * (2.0 * kap / (2.0 * kap - m) * (a - as / M) + sol.params.rho * as / M);
}

double vwap_drift(const VwapSolution& sol, double w, double gamma_prev, double t)
{
    const auto& p = sol.params.base;
    const double M = p.investors;
    const double kap = sol.kappa(t);
    const double m = sol.mu1(t);
    const double rho = sol.params.rho;
    return (2.0 * kap - m) / M * w + (2.0 * kap * (rho - 1.0) - m * rho) / M * gamma_prev * p.target_imbalance();
}

double vwap_perceived_drift(const VwapSolution& sol, int i, double theta, double w, double gamma_prev, double t)
{
    const auto& p = sol.params.base;
    const double M = p.investors;
    const double kap = sol.kappa(t);
    const double m = sol.mu1(t);
    const double rho = sol.params.rho;
    const double den = 2.0 * kap - m;
    const double mu2 = 2.0 * (kap - m) * (2.0 * kap * (rho - 1.0) - m * rho) / (M * den);
    const double mu3 = 2.0 * (kap - m) / M;
    const double mu4 = -2.0 * kap * m / den;
    const double as = p.target_imbalance();
    return m * theta + mu2 * as * gamma_prev + mu3 * w + mu4 * investor(p, i).target * gamma_prev;
}

double vwap_price(const VwapSolution& sol, double w, double dividend, double gamma, double t)
{
    const auto& p = sol.params.base;
    const double as = p.target_imbalance();
    if (t >= 1.0)
        return dividend + p.phi0 * as + p.phi1 * w;
    return sol.g0(t) + sol.sigma_w(t) * w + dividend + sol.sigma_gamma(t) * as * gamma;
}

void gamma_bridge_path(StreamRng& rng, int n, std::span<double> out)
{
    if (out.size() != static_cast<std::size_t>(n) + 1)
        throw Error(ErrorCode::GridMismatch, "bridge buffer must hold N+1 values");
    const double h = 1.0 / n;
    out[0] = 0.0;
    for (int k = 0; k + 1 < n; ++k) {
        const double rest = static_cast<double>(n - k - 1) / n;
        const double jump = rng.beta(h, rest);
        out[k + 1] = out[k] + (1.0 - out[k]) * jump;
    }
    out[n] = 1.0;
}

std::uint64_t bridge_stream(std::uint64_t path)
{
    return (path << 1) | 1u;
}

GammaBridgeSet simulate_gamma_bridge(int n, int n_paths, std::uint64_t seed)
{
    if (n < 2 || n_paths < 0)
        throw Error(ErrorCode::InvalidArgument, "bridge simulation needs N >= 2 and n_paths >= 0");
    GammaBridgeSet set;
    set.grid = n;
    set.paths.assign(static_cast<std::size_t>(n_paths), std::vector<double>(static_cast<std::size_t>(n) + 1));
    for (int j = 0; j < n_paths; ++j) {
        StreamRng rng(seed, bridge_stream(static_cast<std::uint64_t>(j)));
        gamma_bridge_path(rng, n, set.paths[static_cast<std::size_t>(j)]);
    }
    return set;
}

} // namespace twap
