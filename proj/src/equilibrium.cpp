#include "twap/equilibrium.hpp"

#include "twap/errors.hpp"
#include "twap/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace twap {

namespace {

struct PricingCoefficients {
    double mu0, mu2, mu3, mu4, mu5;
};

PricingCoefficients pricing_coefficients(double kappa, double gamma, double mu1, int m)
{
    const double M = m;
    const double den = 2.0 * kappa - mu1;
    return {
        4.0 * kappa * gamma * (mu1 - kappa) / (M * den),
        -2.0 * kappa * gamma * mu1 / den,
        2.0 * (kappa - mu1) / M,
        4.0 * (gamma - 1.0) * kappa * (kappa - mu1) / (M * den),
        2.0 * (gamma - 1.0) * kappa * mu1 / den,
    };
}

void check_grids(const TimeFunction& kappa, const TimeFunction& gamma, const TimeFunction& mu1)
{
    if (kappa.grid() != gamma.grid() || kappa.grid() != mu1.grid())
        throw Error(ErrorCode::GridMismatch, "kappa, gamma and mu1 must share one grid");
}

TimeFunction like_kappa(std::vector<double> v, const TimeFunction& kappa)
{
    return TimeFunction::sampled(std::move(v), kappa.singular_at_one(), kappa.tail_exponent());
}

struct Pointwise {
    double kappa, gamma, mu1;
};

Pointwise at(const EquilibriumSolution& sol, double t)
{
    const auto& in = sol.inputs;
    const Instant i = Instant::at(t);
    return {in.kappa(i), in.gamma(i), in.mu1(i)};
}

} // namespace

TimeFunction solve_sigma_w(const ModelParams& params, const TimeFunction& kappa, const TimeFunction& mu1)
{
    if (kappa.grid() != mu1.grid())
        throw Error(ErrorCode::GridMismatch, "kappa and mu1 live on different grids");
    const int n = kappa.grid();
    const double M = params.investors;
    std::vector<double> impact(n + 1);
    for (int k = 0; k <= n; ++k)
        impact[k] = (2.0 * kappa[k] - mu1[k]) / M;
    const auto impact_int =
        quad::tail_integrals(impact, std::max(kappa.tail_exponent(), mu1.tail_exponent()), params.pi);
    std::vector<double> sw(n + 1);
    for (int k = 0; k <= n; ++k)
        sw[k] = std::exp(params.pi * (kappa.time(k) - 1.0)) * params.phi1 - impact_int[k];
    return TimeFunction::sampled(std::move(sw));
}

EquilibriumSolution solve(const ModelParams& params, const TimeFunction& kappa, const TimeFunction& gamma,
                          const TimeFunction& mu1)
{
    params.validate();
    check_grids(kappa, gamma, mu1);
    check_second_order(kappa, mu1);
    square_integral(kappa, mu1);

    const int n = kappa.grid();
    const double M = params.investors;
    const double p = std::max(kappa.tail_exponent(), mu1.tail_exponent());
    const auto sz = static_cast<std::size_t>(n) + 1;

    std::vector<double> target(sz), residual(sz);
    for (int k = 0; k <= n; ++k) {
        target[k] = 2.0 * gamma[k] * kappa[k] / M;
        residual[k] = 2.0 * kappa[k] * (1.0 - gamma[k]) / M;
    }
    const auto target_int = quad::tail_integrals(target, p);
    const auto residual_int = quad::tail_integrals(residual, p);

    TimeFunction sigma = solve_sigma_w(params, kappa, mu1);
    std::vector<double> g(sz), g0(sz);
    for (int k = 0; k <= n; ++k)
        g[k] = params.phi0 + target_int[k];
    const auto sw_int = quad::tail_integrals(sigma.values());
    for (int k = 0; k <= n; ++k)
        g0[k] = params.alpha * sw_int[k] + params.w0 * residual_int[k];

    std::vector<double> c0(sz), c2(sz), c3(sz), c4(sz), c5(sz);
    for (int k = 0; k <= n; ++k) {
        const auto c = pricing_coefficients(kappa[k], gamma[k], mu1[k], params.investors);
        c0[k] = c.mu0;
        c2[k] = c.mu2;
        c3[k] = c.mu3;
        c4[k] = c.mu4;
        c5[k] = c.mu5;
    }

    EquilibriumSolution sol{
        {params, kappa, gamma, mu1},
        TimeFunction::sampled(std::move(g0)),
        TimeFunction::sampled(std::move(g)),
        std::move(sigma),
        like_kappa(std::move(c0), kappa),
        like_kappa(std::move(c2), kappa),
        like_kappa(std::move(c3), kappa),
        like_kappa(std::move(c4), kappa),
        like_kappa(std::move(c5), kappa),
    };
    return sol;
}

HoldingsProfile holdings_profile(const EquilibriumSolution& sol)
{
    const auto& in = sol.inputs;
    const int n = sol.grid();
    const double M = in.params.investors;
    std::vector<double> lw(n + 1, 1.0 / M), lt(n + 1), li(n + 1);
    for (int k = 0; k <= n; ++k) {
        const double den = 2.0 * in.kappa[k] - in.mu1[k];
        lt[k] = 2.0 * in.kappa[k] * in.gamma[k] / den;
        li[k] = 2.0 * in.kappa[k] * (1.0 - in.gamma[k]) / den;
    }
    return {TimeFunction::sampled(std::move(lw)), TimeFunction::sampled(std::move(lt)),
            TimeFunction::sampled(std::move(li))};
}

Investor investor(const ModelParams& p, int i)
{
    if (i < 0 || i >= p.investors)
        throw Error(ErrorCode::InvalidArgument, "investor index out of range");
    return {p.targets[static_cast<std::size_t>(i)], p.initial_holdings[static_cast<std::size_t>(i)]};
}

double holdings(const EquilibriumSolution& sol, const Investor& who, double w, double t)
{
    const auto& p = sol.params();
    const double M = p.investors;
    const auto c = at(sol, t);
    const double den = 2.0 * c.kappa - c.mu1;
    return w / M + 2.0 * c.kappa * c.gamma / den * (who.target - p.target_imbalance() / M) +
           2.0 * c.kappa * (1.0 - c.gamma) / den * (who.initial - p.w0 / M);
}

double holdings(const EquilibriumSolution& sol, int i, double w, double t)
{
    return holdings(sol, investor(sol.params(), i), w, t);
}

double drift(const EquilibriumSolution& sol, double w, double t)
{
    const auto& p = sol.params();
    const double M = p.investors;
    const auto c = at(sol, t);
    return (2.0 * c.kappa - c.mu1) / M * w + 2.0 * c.kappa * (c.gamma - 1.0) / M * p.w0 -
           2.0 * c.kappa * c.gamma / M * p.target_imbalance();
}

double perceived_drift(const EquilibriumSolution& sol, const Investor& who, double theta, double w, double t)
{
    const auto& p = sol.params();
    const auto c = at(sol, t);
    const auto mu = pricing_coefficients(c.kappa, c.gamma, c.mu1, p.investors);
    return mu.mu0 * p.target_imbalance() + c.mu1 * theta + mu.mu2 * who.target + mu.mu3 * w + mu.mu4 * p.w0 +
           mu.mu5 * who.initial;
}

double price(const EquilibriumSolution& sol, double w, double dividend, double t)
{
    const auto& p = sol.params();
    if (t >= 1.0)
        return dividend + p.phi0 * p.target_imbalance() + p.phi1 * w;
    return sol.g0(t) + sol.g(t) * p.target_imbalance() + sol.sigma_w(t) * w + dividend;
}

double infer_imbalance(const EquilibriumSolution& sol, double opening_price)
{
    const auto& p = sol.params();
    const double g = sol.g.front();
    if (g == 0.0)
        throw Error(ErrorCode::DomainError, "g(0) = 0, the opening price does not reveal the imbalance");
    return (opening_price - sol.g0.front() - sol.sigma_w.front() * p.w0 - p.D0) / g;
}

double average_deviation(const EquilibriumSolution& sol, double w, double t)
{
    const auto& p = sol.params();
    const double gamma = sol.inputs.gamma(t);
    double sum = 0.0;
    for (int i = 0; i < p.investors; ++i) {
        const auto who = investor(p, i);
        sum += holdings(sol, who, w, t) - who.initial - gamma * (who.target - who.initial);
    }
    return sum / p.investors;
}

SupplyMoments supply_moments(const ModelParams& p, double t)
{
    if (p.pi == 0.0)
        return {p.w0 + p.alpha * t, p.eta * p.eta * t};
    // (1 - e^{-x}) / pi evaluated without cancellation
    const double decay = -std::expm1(-p.pi * t) / p.pi;
    const double var = -p.eta * p.eta * std::expm1(-2.0 * p.pi * t) / (2.0 * p.pi);
    return {p.w0 * std::exp(-p.pi * t) + p.alpha * decay, var};
}

TimeFunction expected_drift_profile(const EquilibriumSolution& sol)
{
    const auto& in = sol.inputs;
    const auto& p = in.params;
    const double M = p.investors;
    const int n = sol.grid();
    std::vector<double> v(n + 1);
    for (int k = 0; k <= n; ++k) {
        const double ew = supply_moments(p, in.kappa.time(k)).mean;
        const double kap = in.kappa[k];
        v[k] = (2.0 * kap - in.mu1[k]) / M * ew + 2.0 * kap * (in.gamma[k] - 1.0) / M * p.w0 -
               2.0 * kap * in.gamma[k] / M * p.target_imbalance();
    }
    return TimeFunction::sampled(std::move(v), in.kappa.singular_at_one(), in.kappa.tail_exponent());
}

TimeFunction premium_variance(const EquilibriumSolution& sol)
{
    const int n = sol.grid();
    std::vector<double> v(n + 1);
    for (int k = 0; k <= n; ++k) {
        const double s = sol.sigma_w[k];
        v[k] = s * s * supply_moments(sol.params(), sol.sigma_w.time(k)).variance;
    }
    return TimeFunction::sampled(std::move(v));
}

SigmaOrdering compare_sigma_w(const EquilibriumSolution& a, const EquilibriumSolution& b)
{
    if (a.grid() != b.grid())
        throw Error(ErrorCode::GridMismatch, "solutions live on different grids");
    SigmaOrdering o{INFINITY, -INFINITY};
    for (int k = 0; k <= a.grid(); ++k) {
        const double d = b.sigma_w[k] - a.sigma_w[k];
        o.min_diff = std::min(o.min_diff, d);
        o.max_diff = std::max(o.max_diff, d);
    }
    return o;
}

ComparativeStatics comparative_statics(const EquilibriumSolution& sol, double bump)
{
    const auto& in = sol.inputs;
    const int n = sol.grid();

    std::vector<double> mu_up(n + 1), kappa_up(n + 1);
    for (int k = 0; k <= n; ++k) {
        mu_up[k] = in.mu1[k] + bump * (in.kappa[k] - in.mu1[k]);
        kappa_up[k] = in.kappa[k] * (1.0 + bump);
    }
    const auto more_impact =
        solve(in.params, in.kappa, in.gamma, like_kappa(std::move(mu_up), in.kappa));
    const auto more_penalty =
        solve(in.params, like_kappa(std::move(kappa_up), in.kappa), in.gamma, in.mu1);

    ModelParams crowd = in.params;
    crowd.investors += 1;
    crowd.targets.push_back(0.0);
    crowd.initial_holdings.assign(static_cast<std::size_t>(crowd.investors), crowd.w0 / crowd.investors);
    if (!crowd.initial_cash.empty())
        crowd.initial_cash.push_back(0.0);
    if (!crowd.moments.mean.empty()) {
        crowd.moments.mean.push_back(0.0);
        crowd.moments.second.push_back(0.0);
    }
    const auto more_investors = solve(crowd, in.kappa, in.gamma, in.mu1);

    ModelParams faster = in.params;
    faster.pi += bump;
    const auto more_reversion = solve(faster, in.kappa, in.gamma, in.mu1);

    bool nonpositive = true;
    for (double s : sol.sigma_w.values())
        nonpositive = nonpositive && s <= 0.0;

    return {
        compare_sigma_w(sol, more_impact).nondecreasing(),
        compare_sigma_w(sol, more_investors).nondecreasing(),
        compare_sigma_w(sol, more_penalty).nonincreasing(),
        compare_sigma_w(sol, more_reversion).nondecreasing(),
        nonpositive,
        premium_variance(sol),
    };
}

} // namespace twap
