#include "scenario.hpp"

#include "twap/calibrate.hpp"
#include "twap/equilibrium.hpp"
#include "twap/errors.hpp"
#include "twap/exputil.hpp"
#include "twap/montecarlo.hpp"
#include "twap/vwap.hpp"
#include "twap/welfare.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <fstream>
#include <map>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace twap;
using twap::cli::Scenario;

namespace {

struct Overrides {
    std::string config;
    std::string out;
    int grid = 0;
    std::int64_t paths = -1;
    std::int64_t seed = -1;
};

Scenario scenario(const Overrides& o)
{
    Scenario s = o.config.empty() ? cli::scenario_from_table({}) : cli::load_scenario(o.config);
    if (!o.out.empty())
        s.out_dir = o.out;
    if (o.grid != 0) {
        if (o.grid < 2)
            throw Error(ErrorCode::ConfigError, "--grid must be at least 2");
        s.grid = o.grid;
    }
    if (o.paths >= 0)
        s.paths = o.paths;
    if (o.seed >= 0)
        s.seed = static_cast<std::uint64_t>(o.seed);
    return s;
}

struct Column {
    std::string name;
    std::vector<double> values;
};

Column column(std::string name, const TimeFunction& f)
{
    return {std::move(name), std::vector<double>(f.values().begin(), f.values().end())};
}

std::string stamp(const Scenario& s)
{
    return fmt::format("config_hash={:016x} grid={}", s.hash, s.grid);
}

std::ofstream open_out(const Scenario& s, const std::string& name)
{
    fs::create_directories(s.out_dir);
    std::ofstream out(s.out_dir / name);
    if (!out)
        throw Error(ErrorCode::ConfigError, "cannot write " + (s.out_dir / name).string());
    return out;
}

void write_grid_csv(const Scenario& s, const std::string& name, const std::vector<Column>& cols)
{
    auto out = open_out(s, name);
    out << "# " << stamp(s) << "\nt";
    for (const auto& c : cols)
        out << ',' << c.name;
    out << '\n';
    const std::size_t rows = cols.front().values.size();
    for (std::size_t k = 0; k < rows; ++k) {
        out << fmt::format("{:.12g}", static_cast<double>(k) / static_cast<double>(rows - 1));
        for (const auto& c : cols)
            out << fmt::format(",{:.12g}", c.values[k]);
        out << '\n';
    }
}

void write_rows(const Scenario& s, const std::string& name, const std::vector<std::string>& header,
                const std::vector<std::vector<std::string>>& rows)
{
    auto out = open_out(s, name);
    out << "# " << stamp(s) << '\n';
    for (std::size_t j = 0; j < header.size(); ++j)
        out << (j ? "," : "") << header[j];
    out << '\n';
    for (const auto& r : rows) {
        for (std::size_t j = 0; j < r.size(); ++j)
            out << (j ? "," : "") << r[j];
        out << '\n';
    }
}

std::string num(double v)
{
    return fmt::format("{:.12g}", v);
}

struct Solved {
    TimeFunction kappa, gamma, mu1;
    EquilibriumSolution sol;
};

Solved solve_scenario(const Scenario& s)
{
    s.model.validate();
    auto kappa = cli::scenario_kappa(s, s.grid);
    auto gamma = cli::scenario_gamma(s, s.grid);
    auto mu1 = resolve_mu1(cli::scenario_selector(s, kappa), s.model, kappa, gamma);
    auto sol = solve(s.model, kappa, gamma, mu1);
    return {std::move(kappa), std::move(gamma), std::move(mu1), std::move(sol)};
}

void cmd_solve(const Scenario& s)
{
    const auto r = solve_scenario(s);
    const auto& sol = r.sol;
    write_grid_csv(s, "coefficients.csv",
                   {column("g0", sol.g0), column("g", sol.g), column("sigma_w", sol.sigma_w), column("mu0", sol.mu0),
                    column("mu1", r.mu1), column("mu2", sol.mu2), column("mu3", sol.mu3), column("mu4", sol.mu4),
                    column("mu5", sol.mu5)});
    double margin = r.kappa[0] - r.mu1[0];
    for (int k = 0; k <= s.grid; ++k)
        margin = std::min(margin, r.kappa[k] - r.mu1[k]);
    const auto& p = s.model;
    const double s0 = price(sol, p.w0, p.D0, 0.0);
    write_rows(s, "summary.csv", {"S0", "g0_0", "g_0", "sigma_w_0", "soc_margin"},
               {{num(s0), num(sol.g0.front()), num(sol.g.front()), num(sol.sigma_w.front()), num(margin)}});
}

void cmd_tables(const Scenario& s)
{
    const int n = s.grid;
    const auto gamma = cli::scenario_gamma(s, n);
    const std::vector<PenaltyProfile> profiles = {PenaltyProfile::Constant, PenaltyProfile::Linear,
                                                  PenaltyProfile::PowerTail, PenaltyProfile::Piecewise};
    const std::vector<std::pair<std::string, EquilibriumSelector>> selectors = {
        {"welfare", selector::WelfareMax{}}, {"radner", selector::Radner{}}, {"vayanos", selector::Vayanos{}}};

    std::vector<std::vector<std::string>> t1, t2;
    std::vector<Column> fig1, fig2, fig3;
    for (auto prof : profiles) {
        const auto kappa = builtin_kappa(prof, n);
        const std::string id(profile_name(prof));
        std::vector<std::string> row = {id};
        for (const auto& [name, sel] : selectors) {
            const auto mu1 = resolve_mu1(sel, s.model, kappa, gamma);
            row.push_back(fmt::format("{:.3f}", expected_welfare(s.model, kappa, gamma, mu1)));
            const auto sol = solve(s.model, kappa, gamma, mu1);
            fig2.push_back(column(id + "_" + name, sol.sigma_w));
            std::vector<double> ratio(n + 1);
            for (int k = 0; k <= n; ++k)
                ratio[k] = 2.0 * kappa[k] / (2.0 * kappa[k] - mu1[k]);
            fig3.push_back({id + "_" + name, std::move(ratio)});
            if (name == "welfare") {
                fig1.push_back(column(id, mu1));
                const auto rep = welfare_decomposition(s.model, kappa, gamma, mu1);
                t2.push_back({id, fmt::format("{:.3f}", rep.total), fmt::format("{:.3f}", rep.initial_wealth),
                              fmt::format("{:.3f}", rep.trading_profit), fmt::format("{:.3f}", rep.penalty)});
            }
        }
        t1.push_back(std::move(row));
    }
    write_rows(s, "table1.csv", {"kappa", "Welfare", "Radner", "Vayanos"}, t1);
    write_rows(s, "table2.csv", {"kappa", "Welfare", "S0w0", "TradingProfit", "Penalty"}, t2);
    write_grid_csv(s, "fig1_mu1.csv", fig1);
    write_grid_csv(s, "fig2_sigmaw.csv", fig2);
    write_grid_csv(s, "fig3_ratio.csv", fig3);
}

SimConfig sim_config(const Scenario& s, bool wealth)
{
    SimConfig c;
    c.n_steps = s.grid;
    c.n_paths = s.paths;
    c.seed = s.seed;
    c.stride = s.stride;
    c.threads = s.threads;
    c.track_wealth = wealth;
    return c;
}

void write_long(const Scenario& s, const std::string& name, const std::vector<StatRow>& rows)
{
    auto out = open_out(s, name);
    write_long_csv(out, rows, stamp(s));
}

void cmd_simulate(const Scenario& s)
{
    if (s.paths <= 0)
        throw Error(ErrorCode::ConfigError, "simulation needs paths > 0");
    const auto r = solve_scenario(s);
    const auto b = simulate(r.sol, sim_config(s, true));
    write_long(s, "fig_deviation.csv", twap_deviation_stats(b, r.sol));
    write_long(s, "figD_premium.csv", liquidity_premium_stats(b, r.sol));

    auto rows = holdings_stats(b, r.sol);
    for (auto& q : quadratic_variation_stats(b, r.sol))
        rows.push_back(q);
    rows.push_back(monte_carlo_welfare(b));
    double ce = 0.0;
    std::map<double, BetaSystem> by_holding;
    for (int i = 0; i < s.model.investors; ++i) {
        const double th = s.model.initial_holdings[static_cast<std::size_t>(i)];
        auto it = by_holding.find(th);
        if (it == by_holding.end())
            it = by_holding.emplace(th, solve_betas(s.model, r.kappa, r.gamma, r.mu1, th)).first;
        ce += certainty_equivalent(it->second, r.sol, i);
    }
    rows.push_back({"welfare_analytic", 1.0, ce, 0.0});
    rows.push_back({"max_clearing_error", 1.0, b.max_clearing_error, 0.0});
    write_long(s, "mc_stats.csv", rows);
}

TimeFunction non_welfare_mu1(const Scenario& s, const TimeFunction& kappa, const TimeFunction& gamma,
                             SecondOrderCheck check, const char* what)
{
    if (s.selector == "welfare")
        throw Error(ErrorCode::ConfigError, std::string("the welfare selector is not available for ") + what);
    return resolve_mu1(cli::scenario_selector(s, kappa), s.model, kappa, gamma, check);
}

void cmd_vwap(const Scenario& s)
{
    VwapParams vp{s.model, s.rho};
    vp.validate();
    const auto kappa = cli::scenario_kappa(s, s.grid);
    const auto gamma = cli::scenario_gamma(s, s.grid);
    const auto mu1 = non_welfare_mu1(s, kappa, gamma, SecondOrderCheck::Linear, "stochastic targets");
    const auto sol = solve_vwap(vp, kappa, mu1);
    write_grid_csv(s, "vwap_coefficients.csv",
                   {column("g0", sol.g0), column("sigma_w", sol.sigma_w), column("sigma_gamma", sol.sigma_gamma),
                    column("mu1", mu1), column("mu2", sol.mu2), column("mu3", sol.mu3), column("mu4", sol.mu4)});
    if (s.paths <= 0)
        return;
    const auto b = simulate(sol, sim_config(s, false));
    std::vector<StatRow> rows;
    for (std::size_t j = 0; j < b.nodes.size(); ++j) {
        const double t = b.times[j];
        rows.push_back({"gamma_mean", t, b.gamma.mean[j], b.gamma.stderr_mean(j)});
        rows.push_back({"gamma_drift_compensated", t, b.gamma_drift.mean[j], b.gamma_drift.stderr_mean(j)});
        rows.push_back({"gamma_qv_compensated", t, b.gamma_qv.mean[j], b.gamma_qv.stderr_mean(j)});
        rows.push_back({"premium_mean", t, b.premium.mean[j], b.premium.stderr_mean(j)});
    }
    rows.push_back({"max_clearing_error", 1.0, b.max_clearing_error, 0.0});
    write_long(s, "vwap_stats.csv", rows);
}

void cmd_exp(const Scenario& s)
{
    ExpParams ep(s.model, s.tau);
    const auto kappa = cli::scenario_kappa(s, s.grid);
    const auto gamma = cli::scenario_gamma(s, s.grid);
    const auto mu1 = non_welfare_mu1(s, kappa, gamma, SecondOrderCheck::Deferred, "exponential utility");
    const auto sol = solve_exp(ep, kappa, gamma, mu1);
    write_grid_csv(s, "exp_coefficients.csv",
                   {column("beta0", sol.beta0), column("beta1", sol.beta1), column("beta2", sol.beta2),
                    column("beta3", sol.beta3), column("beta4", sol.beta4), column("beta5", sol.beta5),
                    column("beta6", sol.beta6), column("beta8", sol.beta8), column("sigma_w", sol.sigma_w),
                    column("g", sol.g), column("g0", sol.g0), column("mu0", sol.mu0), column("mu1", sol.mu1),
                    column("mu2", sol.mu2), column("mu3", sol.mu3), column("mu4", sol.mu4), column("mu5", sol.mu5)});
}

void cmd_calibrate(const Scenario& s)
{
    const auto kappa = cli::scenario_kappa(s, s.grid);
    if (!s.lambda_file.empty()) {
        std::ifstream in(s.lambda_file);
        if (!in)
            throw Error(ErrorCode::ConfigError, "cannot open lambda file " + s.lambda_file.string());
        const auto curve = read_lambda_csv(in, s.grid);
        const auto res = implied_mu1(curve, s.model, kappa);
        write_grid_csv(s, "calibrated_mu1.csv", {column("lambda", curve.lambda), column("mu1", res.mu1)});
        write_rows(s, "calibration_summary.csv", {"phi1"}, {{num(res.phi1)}});
        return;
    }
    const auto r = solve_scenario(s);
    const auto curve = lambda_from_solution(r.sol);
    const auto res = implied_mu1(curve, s.model, kappa);
    double worst = 0.0;
    for (int k = 0; k <= s.grid; ++k)
        worst = std::max(worst, std::abs(res.mu1[k] - r.mu1[k]));
    write_grid_csv(s, "calibrated_mu1.csv",
                   {column("lambda", curve.lambda), column("mu1_in", r.mu1), column("mu1", res.mu1)});
    write_rows(s, "calibration_summary.csv", {"phi1", "max_abs_mu1_error"}, {{num(res.phi1), num(worst)}});
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Continuous-time TWAP and VWAP equilibria"};
    app.require_subcommand(1);
    Overrides o;
    auto add_common = [&o](CLI::App* sub) {
        sub->add_option("--config", o.config, "scenario file")->check(CLI::ExistingFile);
        sub->add_option("--out", o.out, "output directory");
        sub->add_option("--grid", o.grid, "number of time steps");
        sub->add_option("--paths", o.paths, "Monte Carlo paths");
        sub->add_option("--seed", o.seed, "Monte Carlo seed");
    };
    const std::vector<std::pair<std::string, void (*)(const Scenario&)>> commands = {
        {"solve", cmd_solve},     {"tables", cmd_tables}, {"simulate", cmd_simulate},
        {"vwap", cmd_vwap},       {"exp", cmd_exp},       {"calibrate", cmd_calibrate},
    };
    std::vector<CLI::App*> subs;
    for (const auto& [name, fn] : commands)
        add_common(subs.emplace_back(app.add_subcommand(name)));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        const Scenario s = scenario(o);
        for (std::size_t j = 0; j < subs.size(); ++j)
            if (subs[j]->parsed())
                commands[j].second(s);
    } catch (const Error& e) {
        fmt::print(stderr, "{}: {}\n", error_name(e.code()), e.what());
        return is_numerical(e.code()) ? 3 : 2;
    } catch (const std::exception& e) {
        fmt::print(stderr, "Error: {}\n", e.what());
        return 1;
    }
    return 0;
}
