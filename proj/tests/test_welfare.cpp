#include <catch_amalgamated.hpp>

#include "test_support.hpp"
#include "twap/welfare.hpp"

#include <cmath>

using namespace twap;
using Catch::Approx;
using twap::test::code_of;

namespace {

struct Row {
    PenaltyProfile profile;
    double welfare, radner, vayanos;
    double wealth, profit, penalty; // components under the welfare maximizer
};

// Independent evaluation (scipy, adaptive quadrature on the closed-form
// moments) of the reference day with gamma = 0.1 + 0.9 t.
const Row kReference[] = {
    {PenaltyProfile::Constant, 196.058431, 196.013333, 195.868056, 192.140026, 7.408368, 3.489963},
    {PenaltyProfile::Linear, 193.201276, 193.129167, 192.885417, 186.721400, 12.476405, 5.996529},
    {PenaltyProfile::PowerTail, 192.803822, 192.731623, 192.479437, 186.298479, 12.835636, 6.330293},
    {PenaltyProfile::Piecewise, 196.314617, 196.290626, 196.178681, 193.906141, 5.597486, 3.189009},
};

struct Inputs {
    TimeFunction kappa, gamma;
};

Inputs inputs(PenaltyProfile prof, int n)
{
    return {builtin_kappa(prof, n), linear_target_ratio(0.1, 0.9, n)};
}

double total(const EquilibriumSelector& sel, const ModelParams& p, const Inputs& in)
{
    return welfare_decomposition(p, in.kappa, in.gamma, resolve_mu1(sel, p, in.kappa, in.gamma)).total;
}

} // namespace

TEST_CASE("reference welfare totals and components")
{
    const auto p = ModelParams::reference_day();
    for (const auto& r : kReference) {
        CAPTURE(profile_name(r.profile));
        const auto in = inputs(r.profile, 1000);
        const auto mu = resolve_mu1(selector::WelfareMax{}, p, in.kappa, in.gamma);
        const auto d = welfare_decomposition(p, in.kappa, in.gamma, mu);
        CHECK(d.total == Approx(r.welfare).margin(2e-3));
        CHECK(d.initial_wealth == Approx(r.wealth).margin(2e-3));
        CHECK(d.trading_profit == Approx(r.profit).margin(2e-3));
        CHECK(d.penalty == Approx(r.penalty).margin(2e-3));
        CHECK(d.total == Approx(d.initial_wealth + d.trading_profit - d.penalty).margin(1e-9));
        CHECK(total(selector::Radner{}, p, in) == Approx(r.radner).margin(2e-3));
        CHECK(total(selector::Vayanos{}, p, in) == Approx(r.vayanos).margin(2e-3));
    }
}

TEST_CASE("value-function route agrees with the decomposition")
{
    const auto p = ModelParams::reference_day();
    for (auto prof : {PenaltyProfile::Constant, PenaltyProfile::Linear, PenaltyProfile::PowerTail}) {
        CAPTURE(profile_name(prof));
        const auto in = inputs(prof, 1000);
        for (const EquilibriumSelector& sel :
             {EquilibriumSelector{selector::Radner{}}, EquilibriumSelector{selector::WelfareMax{}}}) {
            const auto mu = resolve_mu1(sel, p, in.kappa, in.gamma);
            const double a = expected_welfare(p, in.kappa, in.gamma, mu);
            const double b = welfare_decomposition(p, in.kappa, in.gamma, mu).total;
            CHECK(a == Approx(b).margin(2e-3));
        }
    }
}

TEST_CASE("welfare ordering and the Vayanos gap under constant penalty")
{
    const auto p = ModelParams::reference_day();
    const auto in = inputs(PenaltyProfile::Constant, 1000);
    const double w = total(selector::WelfareMax{}, p, in);
    const double r = total(selector::Radner{}, p, in);
    const double v = total(selector::Vayanos{}, p, in);
    CHECK(w > r);
    CHECK(r > v);
    CHECK(v - r == Approx(195.868056 - 196.013333).margin(1e-4));
}

TEST_CASE("welfare gap is pointwise nonnegative at the maximizer")
{
    const auto p = ModelParams::reference_day();
    const auto in = inputs(PenaltyProfile::Linear, 400);
    const auto mu = resolve_mu1(selector::WelfareMax{}, p, in.kappa, in.gamma);
    const auto [f, h] = welfare_gap(mu, p, in.kappa, in.gamma);
    for (int k = 0; k <= 400; ++k)
        CHECK(f[k] - h[k] >= -1e-12);
    const auto half = mu.map([](double v) { return 0.5 * v; });
    const auto [f2, h2] = welfare_gap(half, p, in.kappa, in.gamma);
    CHECK(f[200] - h[200] > f2[200] - h2[200]);
}

TEST_CASE("without supply noise and drift the maximizer is Radner")
{
    auto p = ModelParams::reference_day();
    p.eta = 0.0;
    p.alpha = 0.0;
    const auto in = inputs(PenaltyProfile::Linear, 200);
    CHECK(total(selector::WelfareMax{}, p, in) == Approx(total(selector::Radner{}, p, in)).margin(1e-12));
}

TEST_CASE("cash adds one for one")
{
    auto p = ModelParams::reference_day();
    const auto in = inputs(PenaltyProfile::Constant, 100);
    const double base = total(selector::Radner{}, p, in);
    p.initial_cash.assign(10, 0.5);
    CHECK(total(selector::Radner{}, p, in) == Approx(base + 5.0).margin(1e-10));
    const auto mu = TimeFunction::constant(0.0, 100);
    CHECK(expected_welfare(p, in.kappa, in.gamma, mu) == Approx(base + 5.0).margin(2e-3));
}

TEST_CASE("decomposition restrictions")
{
    const auto in = inputs(PenaltyProfile::Constant, 50);
    const auto mu = TimeFunction::constant(0.0, 50);
    auto p = ModelParams::reference_day();
    p.pi = 0.3;
    CHECK(code_of([&] { welfare_decomposition(p, in.kappa, in.gamma, mu); }) == ErrorCode::RestrictionViolation);
    p = ModelParams::reference_day();
    p.initial_holdings[0] = 2.0;
    p.initial_holdings[1] = 0.0;
    CHECK(code_of([&] { welfare_decomposition(p, in.kappa, in.gamma, mu); }) == ErrorCode::RestrictionViolation);
    CHECK_NOTHROW(expected_welfare(p, in.kappa, in.gamma, mu));
}

TEST_CASE("value-function coefficients at the close")
{
    const auto p = ModelParams::reference_day();
    const auto in = inputs(PenaltyProfile::Linear, 100);
    const auto b = solve_betas(p, in.kappa, in.gamma, TimeFunction::constant(0.0, 100), 1.0);
    for (std::size_t j = 0; j < 10; ++j)
        CHECK(b[j].back() == 0.0);
    CHECK(b.theta_initial == 1.0);
}
