#include "twap/exputil.hpp"

#include "twap/errors.hpp"
#include "twap/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace twap {

namespace {

enum Slot : std::size_t { B4, SW, B5, B6, B1, B2, B3, B0, B8, G, G0, SLOTS };

} // namespace

ExpParams::ExpParams(ModelParams base, double tau)
    : base_(std::move(base)), tau_(tau)
{
    base_.validate();
    if (!(tau_ > 0.0) || !std::isfinite(tau_))
        throw Error(ErrorCode::InvalidArgument, "risk tolerance must be positive and finite");
    const double share = base_.w0 / base_.investors;
    bool equal = true;
    for (double h : base_.initial_holdings)
        equal = equal && std::abs(h - share) <= 1e-12 * std::max(1.0, std::abs(share));
    if (base_.alpha != 0.0 || base_.pi != 0.0 || base_.eta != 1.0 || !equal)
        throw Error(ErrorCode::RestrictionViolation,
                    "exponential utility needs alpha = 0, pi = 0, eta = 1 and theta_{i,-} = w0/M");
}

RiccatiSolution integrate_exp(const ExpParams& ep, const TimeFunction& kappa, const TimeFunction& gamma,
                              const TimeFunction& mu1, int n)
{
    const auto& p = ep.base();
    const double M = p.investors;
    const double w0 = p.w0;
    const double tau = ep.tau();

    auto rhs = [&](Instant at, const quad::State& y, quad::State& d) {
        const double k = kappa(at);
        const double g = gamma(at);
        const double m = mu1(at);
        const double b4 = y[B4], s = y[SW], b5 = y[B5], b6 = y[B6];
        const double s2 = s * s;
        const double A = 1.0 + s2 + 2.0 * tau * k - tau * m;
        const double B = 1.0 + s2 + 2.0 * tau * k - 2.0 * tau * m;
        const double c = 2.0 * g * k + b5 * s;
        d[B4] = (1.0 + s2 + 2.0 * k * tau - 2.0 * tau * (m + 2.0 * M * M * b4 * b4 * tau)) / (2.0 * M * M * tau * tau);
        d[SW] = (1.0 + s2 + 2.0 * k * tau - m * tau - 2.0 * M * b4 * s * tau) / (M * tau);
        d[B5] = -2.0 * b4 * b5 + c * B / (tau * M * A);
        d[B6] = -2.0 * b4 * b6 - c * B / (tau * M * M * A);
        const double e = 1.0 + 2.0 * tau * k - tau * m;
        d[B1] = (4.0 * tau * b5 * g * k * s * B - tau * b5 * b5 * (e * e + (1.0 + 2.0 * tau * k) * s2) -
                 2.0 * g * g * k * (2.0 * tau * k * (1.0 + s2) + (1.0 - tau * m + s2) * (1.0 - tau * m + s2))) /
                (2.0 * tau * A * A);
        d[B2] = -b5 * b6 - c * c * B / (M * A * A);
        d[B3] = -0.5 * b6 * b6 + c * c * B / (2.0 * M * M * A * A);
        d[B0] = -b4 - w0 * w0 * (g - 1.0) * (g - 1.0) * k / (M * M * tau);
        d[B8] = 2.0 * w0 * (g - 1.0) * g * k / (tau * M);
        d[G] = -(2.0 * g * k + (b5 + M * b6) * s) / M;
        d[G0] = 2.0 * w0 * (g - 1.0) * k / M;
    };

    quad::State terminal(SLOTS, 0.0);
    terminal[SW] = p.phi1;
    terminal[G] = p.phi0;

    quad::BackwardOptions opts;
    opts.singular = kappa.singular_at_one() || mu1.singular_at_one();
    opts.tail_exponent = std::max(kappa.tail_exponent(), mu1.tail_exponent());
    opts.watch = {B4, SW};
    const auto res = quad::rk4_backward(rhs, terminal, n, opts);

    RiccatiSolution sol;
    sol.exploded = res.diverged;
    sol.blow_up_time = res.divergence_time;
    if (res.diverged)
        return sol;

    auto col = [&](Slot j) { return TimeFunction::sampled(quad::column(res, j)); };
    sol.beta4 = col(B4);
    sol.sigma_w = col(SW);
    sol.beta0 = col(B0);
    sol.beta1 = col(B1);
    sol.beta2 = col(B2);
    sol.beta3 = col(B3);
    sol.beta5 = col(B5);
    sol.beta6 = col(B6);
    sol.beta8 = col(B8);
    sol.g = col(G);
    sol.g0 = col(G0);

    const bool sing = opts.singular;
    const double pe = opts.tail_exponent;
    std::vector<double> kv(n + 1), gv(n + 1), mv(n + 1);
    std::vector<double> m0(n + 1), m2(n + 1), m3(n + 1), m4(n + 1);
    for (int k = 0; k <= n; ++k) {
        const Instant at = grid_instant(k, n, sing);
        const double kap = kappa(at), g = gamma(at), m = mu1(at);
        kv[k] = kap;
        gv[k] = g;
        mv[k] = m;
        const double s = sol.sigma_w[k], b4 = sol.beta4[k], b5 = sol.beta5[k], b6 = sol.beta6[k];
        const double A = 1.0 + s * s + 2.0 * kap * tau - m * tau;
        m0[k] = -(2.0 * g * kap + s * b5) * (1.0 + 2.0 * tau * (kap - m) + s * s) / (M * A) - s * b6;
        m2[k] = -m * (2.0 * kap * g + b5 * s) * tau / A;
        m3[k] = (1.0 + s * s + 2.0 * (kap - m - M * b4 * s) * tau) / (M * tau);
        m4[k] = 2.0 * kap * (g - 1.0) / M;
    }
    sol.kappa = TimeFunction::sampled(std::move(kv), kappa.singular_at_one(), kappa.tail_exponent());
    sol.gamma = TimeFunction::sampled(std::move(gv));
    sol.mu1 = TimeFunction::sampled(std::move(mv), mu1.singular_at_one(), mu1.tail_exponent());
    sol.mu0 = TimeFunction::sampled(std::move(m0), sing, pe);
    sol.mu2 = TimeFunction::sampled(std::move(m2), sing, pe);
    sol.mu3 = TimeFunction::sampled(std::move(m3), sing, pe);
    sol.mu4 = TimeFunction::sampled(std::move(m4), sing, pe);
    sol.mu5 = TimeFunction::constant(0.0, n);
    return sol;
}

namespace {

TimeFunction every_fourth(const TimeFunction& f, int n)
{
    std::vector<double> v(n + 1);
    for (int k = 0; k <= n; ++k)
        v[k] = f[4 * k];
    return TimeFunction::sampled(std::move(v), f.singular_at_one(), f.tail_exponent());
}

RiccatiSolution coarsen(const RiccatiSolution& fine, int n)
{
    RiccatiSolution s;
    for (auto [dst, src] : {std::pair{&s.beta4, &fine.beta4}, {&s.sigma_w, &fine.sigma_w}, {&s.beta0, &fine.beta0},
                            {&s.beta1, &fine.beta1}, {&s.beta2, &fine.beta2}, {&s.beta3, &fine.beta3},
                            {&s.beta5, &fine.beta5}, {&s.beta6, &fine.beta6}, {&s.beta8, &fine.beta8},
                            {&s.g, &fine.g}, {&s.g0, &fine.g0}, {&s.mu0, &fine.mu0}, {&s.mu2, &fine.mu2},
                            {&s.mu3, &fine.mu3}, {&s.mu4, &fine.mu4}, {&s.mu5, &fine.mu5},
                            {&s.kappa, &fine.kappa}, {&s.gamma, &fine.gamma}, {&s.mu1, &fine.mu1}})
        *dst = every_fourth(*src, n);
    return s;
}

} // namespace

RiccatiSolution solve_exp(const ExpParams& ep, const TimeFunction& kappa, const TimeFunction& gamma,
                          const TimeFunction& mu1)
{
    const int n = kappa.grid();
    if (gamma.grid() != n || mu1.grid() != n)
        throw Error(ErrorCode::GridMismatch, "kappa, gamma and mu1 must share one grid");
    for (int k = 0; k <= n; ++k)
        if (!(kappa[k] > 0.0))
            throw Error(ErrorCode::InvalidArgument, "kappa must be positive");
    square_integral(kappa, mu1);

    RiccatiSolution sol = integrate_exp(ep, kappa, gamma, mu1, n);
    if (sol.exploded) {
        RiccatiSolution fine = integrate_exp(ep, kappa, gamma, mu1, 4 * n);
        if (fine.exploded) {
            std::ostringstream os;
            os << "Riccati system blows up near t = " << fine.blow_up_time;
            throw ExplosionError(fine.blow_up_time, os.str());
        }
        sol = coarsen(fine, n);
    }

    const double tau = ep.tau();
    for (int k = 0; k <= n; ++k) {
        const double s = sol.sigma_w[k];
        if (!(sol.mu1[k] < (1.0 + s * s) / (2.0 * tau) + sol.kappa[k])) {
            std::ostringstream os;
            os << "second-order condition fails at t = " << kappa.time(k);
            throw Error(ErrorCode::SecondOrderViolation, os.str());
        }
    }
    return sol;
}

double exp_target_loading(const RiccatiSolution& sol, const ExpParams& ep, double t)
{
    const double tau = ep.tau();
    const double k = sol.kappa(t), g = sol.gamma(t), m = sol.mu1(t);
    const double s = sol.sigma_w(t);
    return (2.0 * k * g + sol.beta5(t) * s) * tau / ((2.0 * k - m) * tau + 1.0 + s * s);
}

double exp_holdings(const RiccatiSolution& sol, const ExpParams& ep, int i, double w, double t)
{
    const auto& p = ep.base();
    const double M = p.investors;
    const double a = p.targets.at(static_cast<std::size_t>(i));
    return w / M + exp_target_loading(sol, ep, t) * (a - p.target_imbalance() / M);
}

double exp_drift(const RiccatiSolution& sol, const ExpParams& ep, double w, double t)
{
    const auto& p = ep.base();
    const double M = p.investors;
    const double tau = ep.tau();
    const double k = sol.kappa(t), g = sol.gamma(t), m = sol.mu1(t);
    const double s = sol.sigma_w(t), b4 = sol.beta4(t);
    return (1.0 + s * s + (2.0 * k - m) * tau - 2.0 * M * b4 * s * tau) / (M * tau) * w +
           2.0 * (g - 1.0) * k / M * p.w0 -
           (2.0 * g * k + (sol.beta5(t) + M * sol.beta6(t)) * s) / M * p.target_imbalance();
}

double exp_perceived_drift(const RiccatiSolution& sol, const ExpParams& ep, int i, double theta, double w,
                           double t)
{
    const auto& p = ep.base();
    const double a = p.targets.at(static_cast<std::size_t>(i));
    return sol.mu0(t) * p.target_imbalance() + sol.mu1(t) * theta + sol.mu2(t) * a + sol.mu3(t) * w +
           sol.mu4(t) * p.w0;
}

} // namespace twap
