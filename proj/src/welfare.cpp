#include "twap/welfare.hpp"

#include "twap/errors.hpp"
#include "twap/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace twap {

namespace {

void check_grids(const TimeFunction& kappa, const TimeFunction& gamma, const TimeFunction& mu1)
{
    if (kappa.grid() != gamma.grid() || kappa.grid() != mu1.grid())
        throw Error(ErrorCode::GridMismatch, "kappa, gamma and mu1 must share one grid");
}

} // namespace

BetaSystem solve_betas(const ModelParams& params, const TimeFunction& kappa, const TimeFunction& gamma,
                       const TimeFunction& mu1, double theta)
{
    check_grids(kappa, gamma, mu1);
    check_second_order(kappa, mu1);

    const double M = params.investors;
    const double w0 = params.w0;
    const double alpha = params.alpha;
    const double pi = params.pi;
    const double eta2 = params.eta * params.eta;

    auto rhs = [&](Instant at, const quad::State& b, quad::State& d) {
        const double k = kappa(at);
        const double g = gamma(at);
        const double m = mu1(at);
        const double sq = (m - 2.0 * k) * (m - 2.0 * k);
        const double gm1 = g - 1.0;
        d[0] = -alpha * b[7] - b[4] * eta2 +
               (gm1 * gm1 * k * k * (k - m) * (4.0 * w0 * w0 - 8.0 * M * w0 * theta) -
                M * M * gm1 * gm1 * theta * theta * k * m * m) /
                   (M * M * sq);
        d[1] = -g * g * k * m * m / sq;
        d[2] = 8.0 * g * g * k * k * (m - k) / (M * sq);
        d[3] = 4.0 * g * g * k * k * (k - m) / (M * M * sq);
        d[4] = (k - m) / (M * M) + 2.0 * b[4] * pi;
        d[5] = 4.0 * g * k * (k - m) / (M * (2.0 * k - m)) + b[5] * pi;
        d[6] = 4.0 * g * k * (m - k) / (M * M * (2.0 * k - m)) + b[6] * pi;
        d[7] = -2.0 * alpha * b[4] + b[7] * pi + 4.0 * gm1 * (w0 - M * theta) * k * (k - m) / (M * M * (2.0 * k - m));
        d[8] = -alpha * b[5] + 2.0 * gm1 * g * k * (4.0 * w0 * k * (k - m) + M * theta * m * m) / (M * sq);
        d[9] = -alpha * b[6] + 8.0 * gm1 * g * k * k * (M * theta - w0) * (k - m) / (M * M * sq);
    };

    quad::BackwardOptions opts;
    opts.singular = kappa.singular_at_one() || mu1.singular_at_one();
    opts.tail_exponent = std::max(kappa.tail_exponent(), mu1.tail_exponent());
    const auto res = quad::rk4_backward(rhs, quad::State(10, 0.0), kappa.grid(), opts);

    BetaSystem sys;
    sys.theta_initial = theta;
    for (std::size_t j = 0; j < 10; ++j) {
        auto col = quad::column(res, j);
        for (double v : col)
            if (!std::isfinite(v))
                throw Error(ErrorCode::IntegrationOverflow, "value-function coefficients are not finite");
        sys.beta[j] = TimeFunction::sampled(std::move(col));
    }
    return sys;
}

namespace {

double opening_price(const EquilibriumSolution& sol, double imbalance)
{
    const auto& p = sol.params();
    return sol.g0.front() + sol.g.front() * imbalance + sol.sigma_w.front() * p.w0 + p.D0;
}

} // namespace

double certainty_equivalent(const BetaSystem& b, const EquilibriumSolution& sol, int i)
{
    const auto& p = sol.params();
    const auto who = investor(p, i);
    if (std::abs(who.initial - b.theta_initial) > 1e-12 * std::max(1.0, std::abs(who.initial)))
        throw Error(ErrorCode::InvalidArgument, "coefficients were solved for another initial holding");
    const double a = who.target;
    const double as = p.target_imbalance();
    const double w0 = p.w0;
    const double x0 = who.initial * opening_price(sol, as) + p.cash(i);
    const double quad_form = b[0].front() + b[1].front() * a * a + b[2].front() * a * as +
                             b[3].front() * as * as + b[4].front() * w0 * w0 + b[5].front() * w0 * a +
                             b[6].front() * as * w0 + b[7].front() * w0 + b[8].front() * a + b[9].front() * as;
    return x0 - quad_form;
}

double expected_welfare(const ModelParams& params, const TimeFunction& kappa, const TimeFunction& gamma,
                        const TimeFunction& mu1)
{
    params.validate();
    const auto& tm = params.moments;
    if (tm.mean.size() != static_cast<std::size_t>(params.investors))
        throw Error(ErrorCode::InvalidArgument, "expected welfare needs target moments");
    const auto sol = solve(params, kappa, gamma, mu1);
    const double w0 = params.w0;
    const double mean_s = tm.aggregate_mean();

    std::map<double, BetaSystem> by_holding;
    double total = w0 * opening_price(sol, mean_s);
    for (int i = 0; i < params.investors; ++i) {
        const double th = params.initial_holdings[static_cast<std::size_t>(i)];
        auto it = by_holding.find(th);
        if (it == by_holding.end())
            it = by_holding.emplace(th, solve_betas(params, kappa, gamma, mu1, th)).first;
        const auto& b = it->second;
        const double mi = tm.mean[static_cast<std::size_t>(i)];
        total += params.cash(i);
        total -= b[0].front() + b[4].front() * w0 * w0 + b[5].front() * w0 * mi + b[6].front() * w0 * mean_s +
                 b[7].front() * w0 + b[8].front() * mi + b[9].front() * mean_s;
    }
    // b1..b3 do not depend on the initial holding; sum_i a_i a_S = a_S^2.
    const auto& b = by_holding.begin()->second;
    total -= b[1].front() * tm.sum_second() + (b[2].front() + params.investors * b[3].front()) * tm.aggregate_second;
    return total;
}

WelfareReport welfare_decomposition(const ModelParams& params, const TimeFunction& kappa,
                                    const TimeFunction& gamma, const TimeFunction& mu1)
{
    params.validate();
    const double M = params.investors;
    const double w0 = params.w0;
    const double share = w0 / M;
    bool equal_holdings = true;
    for (double h : params.initial_holdings)
        equal_holdings = equal_holdings && std::abs(h - share) <= 1e-12 * std::max(1.0, std::abs(share));
    if (params.pi != 0.0 || params.phi0 != 0.0 || params.phi1 != 0.0 || !equal_holdings)
        throw Error(ErrorCode::RestrictionViolation,
                    "analytic decomposition needs pi = 0, phi0 = phi1 = 0 and theta_{i,-} = w0/M");
    const auto& tm = params.moments;
    if (tm.mean.size() != static_cast<std::size_t>(params.investors))
        throw Error(ErrorCode::InvalidArgument, "welfare decomposition needs target moments");

    const auto sol = solve(params, kappa, gamma, mu1);
    const int n = kappa.grid();
    const double p = std::max(kappa.tail_exponent(), mu1.tail_exponent());
    const double alpha = params.alpha;
    const double eta2 = params.eta * params.eta;
    const double mean_s = tm.aggregate_mean();
    const double sum_second = tm.sum_second();
    const double agg_second = tm.aggregate_second;

    std::vector<double> profit(n + 1), penalty(n + 1);
    for (int k = 0; k <= n; ++k) {
        const double t = kappa.time(k);
        const double kap = kappa[k];
        const double g = gamma[k];
        const double m = mu1[k];
        const double ew = w0 + alpha * t;
        const double ew2 = w0 * w0 + (2.0 * w0 * alpha + eta2) * t + alpha * alpha * t * t;
        profit[k] = (2.0 * kap - m) / M * ew2 + 2.0 * kap * (g - 1.0) / M * w0 * ew -
                    2.0 * kap * g / M * mean_s * ew;

        // deviation of investor i: A_i + B with
        // A_i = (y - g) a_i - y a_S / M + g w0 / M and B = (w - w0) / M
        const double y = 2.0 * kap * g / (2.0 * kap - m);
        const double sum_a2 = (y - g) * (y - g) * sum_second + y * y / M * agg_second -
                              2.0 * (y - g) * y / M * agg_second + g * g * w0 * w0 / M -
                              2.0 * g * g * w0 / M * mean_s;
        const double sum_a = g * (w0 - mean_s);
        const double eb = alpha * t / M;
        const double eb2 = (eta2 * t + alpha * alpha * t * t) / (M * M);
        penalty[k] = kap * (sum_a2 + 2.0 * sum_a * eb + M * eb2);
    }

    WelfareReport r{};
    r.initial_wealth = w0 * opening_price(sol, mean_s);
    r.trading_profit = quad::integral(profit, p);
    r.penalty = quad::integral(penalty, p);
    r.total = r.initial_wealth + r.trading_profit - r.penalty;
    for (int i = 0; i < params.investors; ++i)
        r.total += params.cash(i);
    return r;
}

std::pair<TimeFunction, TimeFunction> welfare_gap(const TimeFunction& mu1, const ModelParams& params,
                                                  const TimeFunction& kappa, const TimeFunction& gamma)
{
    check_grids(kappa, gamma, mu1);
    const double M = params.investors;
    const double w0 = params.w0;
    const double alpha = params.alpha;
    const double eta2 = params.eta * params.eta;
    const double spread = params.moments.sum_second() - params.moments.aggregate_second / M;
    const int n = kappa.grid();
    std::vector<double> f(n + 1), h(n + 1);
    for (int k = 0; k <= n; ++k) {
        const double t = kappa.time(k);
        const double ew2 = w0 * w0 + (2.0 * w0 * alpha + eta2) * t + alpha * alpha * t * t;
        const double m = mu1[k];
        const double den = 2.0 * kappa[k] - m;
        f[k] = m * (w0 * (w0 + alpha * t) - ew2) / M;
        h[k] = m * m * gamma[k] * gamma[k] * kappa[k] / (den * den) * spread;
    }
    const bool sing = kappa.singular_at_one();
    const double p = kappa.tail_exponent();
    return {TimeFunction::sampled(std::move(f), sing, p), TimeFunction::sampled(std::move(h), sing, p)};
}

} // namespace twap
