#include <catch_amalgamated.hpp>

#include "test_support.hpp"
#include "twap/montecarlo.hpp"
#include "twap/welfare.hpp"

#include <cmath>
#include <sstream>

using namespace twap;
using Catch::Approx;
using twap::test::code_of;

namespace {

EquilibriumSolution reference(PenaltyProfile prof, int n, ModelParams p = ModelParams::reference_day())
{
    const auto kappa = builtin_kappa(prof, n);
    const auto gamma = linear_target_ratio(0.1, 0.9, n);
    return solve(p, kappa, gamma, resolve_mu1(selector::WelfareMax{}, p, kappa, gamma));
}

SimConfig config(int n, std::int64_t paths, int threads = 1)
{
    SimConfig c;
    c.n_steps = n;
    c.n_paths = paths;
    c.seed = 7;
    c.stride = 10;
    c.threads = threads;
    return c;
}

} // namespace

TEST_CASE("results do not depend on the thread count")
{
    const auto sol = reference(PenaltyProfile::Linear, 50);
    auto cfg = config(50, 3000, 1);
    cfg.track_wealth = true;
    const auto a = simulate(sol, cfg);
    cfg.threads = 3;
    const auto b = simulate(sol, cfg);
    CHECK(a.supply.mean == b.supply.mean);
    CHECK(a.supply.variance == b.supply.variance);
    CHECK(a.qv.mean == b.qv.mean);
    CHECK(a.welfare.mean == b.welfare.mean);
    CHECK(a.nodes == std::vector<int>{0, 10, 20, 30, 40, 50});
    cfg.seed = 8;
    CHECK(simulate(sol, cfg).supply.mean[3] != a.supply.mean[3]);
}

TEST_CASE("noise-free supply is deterministic")
{
    auto p = ModelParams::reference_day();
    p.eta = 0.0;
    const auto sol = reference(PenaltyProfile::Constant, 40, p);
    const auto b = simulate(sol, config(40, 200));
    for (std::size_t j = 0; j < b.nodes.size(); ++j) {
        CHECK(b.supply.variance[j] == Approx(0.0).margin(1e-20));
        CHECK(b.supply.mean[j] == Approx(10.0 - b.times[j]).margin(1e-12));
        CHECK(b.theta[0].variance[j] == Approx(0.0).margin(1e-20));
    }
}

TEST_CASE("paths clear, self-finance and accumulate penalty")
{
    auto p = ModelParams::reference_day();
    p.targets = {1.0, -0.5, 0.3, 2.0, 0.0, 0.0, -1.0, 0.7, 0.1, -0.2};
    const auto sol = reference(PenaltyProfile::PowerTail, 100, p);
    auto cfg = config(100, 600, 2);
    cfg.track_wealth = true;
    cfg.keep_paths = 3;
    const auto b = simulate(sol, cfg);
    CHECK(b.max_clearing_error < 1e-10);
    REQUIRE(b.kept.size() == 3);
    for (const auto& sp : b.kept) {
        CHECK(sp.S.front() == Approx(price(sol, p.w0, p.D0, 0.0)));
        CHECK(sp.S.back() == Approx(sp.D.back() + p.phi1 * sp.w.back()));
        for (int i = 0; i < 10; ++i) {
            CHECK(sp.X[i][0] == Approx(p.initial_holdings[i] * sp.S[0]));
            for (int k = 0; k < 100; ++k) {
                CHECK(sp.X[i][k + 1] - sp.X[i][k] == Approx(sp.theta[i][k] * (sp.S[k + 1] - sp.S[k])).margin(1e-9));
                CHECK(sp.L[i][k + 1] >= sp.L[i][k]);
            }
        }
    }
    CHECK(b.kept[0].w != b.kept[1].w);
}

TEST_CASE("supply, holdings and quadratic variation moments")
{
    const int n = 100;
    const auto sol = reference(PenaltyProfile::Linear, n);
    const auto b = simulate(sol, config(n, 20000));
    const std::size_t mid = 5;
    CHECK(b.times[mid] == 0.5);
    CHECK(std::abs(b.supply.mean[mid] - 9.5) < 4 * b.supply.stderr_mean(mid));
    CHECK(b.supply.variance[mid] == Approx(0.5).epsilon(0.05));
    for (const auto& r : holdings_stats(b, sol)) {
        if (r.t != 0.5 || r.stat.rfind("theta_var_analytic_", 0) == 0)
            continue;
        if (r.stat == "theta_mean_0")
            CHECK(std::abs(r.value - 0.95) < 4 * r.stderr_value);
        if (r.stat == "theta_var_0")
            CHECK(std::abs(r.value - 0.005) < 4 * r.stderr_value);
    }
    const auto qv = quadratic_variation_stats(b, sol);
    CHECK(qv[0].stat == "qv");
    CHECK(std::abs(qv[0].value - qv[2].value) < 4 * qv[0].stderr_value);
    CHECK(qv[2].value > 1.0);
}

TEST_CASE("simulated welfare is close to the expected welfare with known targets")
{
    auto p = ModelParams::reference_day();
    p.moments.second.assign(10, 0.0);
    p.moments.aggregate_second = 0.0;
    const int n = 200;
    const auto kappa = builtin_kappa(PenaltyProfile::Constant, n);
    const auto gamma = linear_target_ratio(0.1, 0.9, n);
    const auto mu = TimeFunction::constant(0.0, n);
    const auto sol = solve(p, kappa, gamma, mu);
    auto cfg = config(n, 20000);
    cfg.track_wealth = true;
    const auto b = simulate(sol, cfg);
    const auto w = monte_carlo_welfare(b);
    const double expected = welfare_decomposition(p, kappa, gamma, mu).total;
    CHECK(std::abs(w.value - expected) < 4 * w.stderr_value + 0.01);
    CHECK(code_of([&] { monte_carlo_welfare(simulate(sol, config(n, 10))); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("stochastic-target simulation")
{
    VwapParams vp;
    vp.base = ModelParams::reference_day();
    vp.base.w0 = 0.0;
    vp.base.initial_holdings.assign(10, 0.0);
    vp.base.targets.assign(10, 0.3);
    vp.rho = 0.5;
    const int n = 100;
    const auto kappa = builtin_kappa(PenaltyProfile::Constant, n);
    const auto sol = solve_vwap(vp, kappa, TimeFunction::constant(0.0, n));
    const auto b = simulate(sol, config(n, 20000));
    CHECK(b.max_clearing_error < 1e-10);
    for (std::size_t j = 1; j + 1 < b.nodes.size(); ++j) {
        CHECK(std::abs(b.gamma.mean[j] - b.times[j]) < 4 * b.gamma.stderr_mean(j));
        CHECK(std::abs(b.gamma_drift.mean[j]) < 4 * b.gamma_drift.stderr_mean(j));
    }
}

TEST_CASE("simulation input checks and CSV output")
{
    const auto sol = reference(PenaltyProfile::Constant, 20);
    CHECK(code_of([&] { simulate(sol, config(40, 10)); }) == ErrorCode::GridMismatch);
    std::ostringstream os;
    write_long_csv(os, {{"qv", 1.0, 1.25, 0.01}}, "seed=7");
    CHECK(os.str() == "# seed=7\nstat,t,value,stderr\nqv,1,1.25,0.01\n");
}
