#include "twap/montecarlo.hpp"

#include "twap/errors.hpp"
#include "twap/quadrature.hpp"
#include "twap/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <ostream>
#include <thread>

namespace twap {

double SeriesStats::sd(std::size_t j) const
{
    return std::sqrt(std::max(variance[j], 0.0));
}

double SeriesStats::stderr_mean(std::size_t j) const
{
    return count > 0 ? sd(j) / std::sqrt(static_cast<double>(count)) : 0.0;
}

namespace {

/// Deterministic coefficients of one simulated market.
struct Market {
    int n = 0;
    int investors = 0;
    double h = 0.0;
    double w0 = 0.0, alpha = 0.0, pi = 0.0, eta = 0.0, D0 = 0.0;
    std::vector<double> s0, sw, sg;              ///< S = s0 + sw w + D + sg gamma
    std::vector<std::vector<double>> hb, hc;     ///< theta_i = w/M + hb + hc gamma
    std::vector<double> kappa;                   ///< left-point penalty weight
    std::vector<double> gamma;                   ///< deterministic target ratio
    bool bridge = false;
    double rho_imbalance = 0.0;
    std::vector<double> a, th0, cash;
};

/// Sums of shifted values for one block of paths.
class Accumulator {
public:
    explicit Accumulator(std::size_t nodes = 0)
        : shift_(nodes, 0.0), s1_(nodes, 0.0), s2_(nodes, 0.0) {}

    void add(std::size_t j, double x)
    {
        if (count_ == 0)
            shift_[j] = x;
        const double d = x - shift_[j];
        s1_[j] += d;
        s2_[j] += d * d;
    }
    void next_path() { ++count_; }

    std::size_t nodes() const { return s1_.size(); }
    std::int64_t count() const { return count_; }
    double mean(std::size_t j) const { return shift_[j] + s1_[j] / count_; }
    double m2(std::size_t j) const { return std::max(s2_[j] - s1_[j] * s1_[j] / count_, 0.0); }

private:
    std::vector<double> shift_, s1_, s2_;
    std::int64_t count_ = 0;
};

struct Partial {
    std::int64_t n = 0;
    std::vector<double> mean, m2;
};

Partial to_partial(const Accumulator& a)
{
    Partial p;
    p.n = a.count();
    p.mean.resize(a.nodes());
    p.m2.resize(a.nodes());
    if (p.n == 0)
        return p;
    for (std::size_t j = 0; j < a.nodes(); ++j) {
        p.mean[j] = a.mean(j);
        p.m2[j] = a.m2(j);
    }
    return p;
}

Partial merge(const Partial& x, const Partial& y)
{
    if (x.n == 0)
        return y;
    if (y.n == 0)
        return x;
    Partial r;
    r.n = x.n + y.n;
    r.mean.resize(x.mean.size());
    r.m2.resize(x.mean.size());
    const double nx = static_cast<double>(x.n), ny = static_cast<double>(y.n), nr = static_cast<double>(r.n);
    for (std::size_t j = 0; j < x.mean.size(); ++j) {
        const double d = y.mean[j] - x.mean[j];
        r.mean[j] = x.mean[j] + d * ny / nr;
        r.m2[j] = x.m2[j] + y.m2[j] + d * d * nx * ny / nr;
    }
    return r;
}

Partial tree_merge(std::vector<Partial>& parts, std::size_t lo, std::size_t hi)
{
    if (hi - lo == 1)
        return std::move(parts[lo]);
    const std::size_t mid = lo + (hi - lo) / 2;
    return merge(tree_merge(parts, lo, mid), tree_merge(parts, mid, hi));
}

SeriesStats finish(Partial p)
{
    SeriesStats s;
    s.count = p.n;
    s.mean = std::move(p.mean);
    s.variance.resize(p.m2.size());
    for (std::size_t j = 0; j < p.m2.size(); ++j)
        s.variance[j] = p.n > 1 ? p.m2[j] / static_cast<double>(p.n - 1) : 0.0;
    return s;
}

enum Series : std::size_t { Supply, Premium, Qv, QvRaw, Gamma, GammaDrift, GammaQv, Welfare, Fixed };

struct Block {
    std::vector<Accumulator> acc;
    double clearing = 0.0;
    std::vector<StoredPath> kept;
};

std::size_t theta_slot(int i) { return Fixed + static_cast<std::size_t>(i); }
std::size_t wealth_slot(int i, int m) { return Fixed + static_cast<std::size_t>(m + i); }
std::size_t penalty_slot(int i, int m) { return Fixed + static_cast<std::size_t>(2 * m + i); }

constexpr std::int64_t block_size = 512;

void run_block(const Market& mk, const SimConfig& cfg, const std::vector<int>& nodes, std::int64_t first,
               std::int64_t last, Block& out)
{
    const int n = mk.n;
    const int M = mk.investors;
    const std::size_t rec = nodes.size();
    const std::size_t slots = Fixed + static_cast<std::size_t>(cfg.track_wealth ? 3 * M : M);
    out.acc.clear();
    for (std::size_t s = 0; s < slots; ++s)
        out.acc.emplace_back(s == Welfare ? 1 : rec);

    const double h = mk.h;
    const double sqh = std::sqrt(h);
    double ou_mean = 1.0, ou_shift = mk.alpha * h, ou_sd = mk.eta * sqh;
    if (mk.pi != 0.0) {
        ou_mean = std::exp(-mk.pi * h);
        ou_shift = -mk.alpha * std::expm1(-mk.pi * h) / mk.pi;
        ou_sd = mk.eta * std::sqrt(-std::expm1(-2.0 * mk.pi * h) / (2.0 * mk.pi));
    }

    std::vector<double> bridge(static_cast<std::size_t>(n) + 1);
    std::vector<double> theta(M), X(M), L(M), theta_prev(M);

    for (std::int64_t path = first; path < last; ++path) {
        StreamRng rng(cfg.seed, 2 * static_cast<std::uint64_t>(path));
        if (mk.bridge) {
            StreamRng brng(cfg.seed, bridge_stream(static_cast<std::uint64_t>(path)));
            gamma_bridge_path(brng, n, bridge);
        }
        const bool keep = path < cfg.keep_paths;
        StoredPath sp;
        if (keep) {
            sp.theta.assign(M, {});
            sp.X.assign(M, {});
            sp.L.assign(M, {});
        }

        double w = mk.w0, D = mk.D0, S_prev = 0.0, w_prev = 0.0;
        double qv = 0.0, qv_raw = 0.0, drift_comp = 0.0, qv_comp = 0.0, gq = 0.0;
        std::size_t r = 0;
        for (int k = 0; k <= n; ++k) {
            const double g = mk.bridge ? bridge[k] : mk.gamma[k];
            const double S = mk.s0[k] + mk.sw[k] * w + D + mk.sg[k] * g;
            double total = 0.0;
            for (int i = 0; i < M; ++i) {
                theta[i] = w / M + mk.hb[i][k] + mk.hc[i][k] * g;
                total += theta[i];
            }
            out.clearing = std::max(out.clearing, std::abs(total - w - mk.rho_imbalance * g));

            if (k == 0) {
                for (int i = 0; i < M; ++i) {
                    X[i] = mk.th0[i] * S + mk.cash[i];
                    L[i] = 0.0;
                }
            } else {
                const double dS = S - S_prev;
                for (int i = 0; i < M; ++i)
                    X[i] += theta_prev[i] * dS;
                const double gp = mk.bridge ? bridge[k - 1] : 0.0;
                const double tp = static_cast<double>(k - 1) / n;
                const double eg = k == n ? 1.0 : gp + (1.0 - gp) * h / (1.0 - tp);
                const double ew = ou_mean * w_prev + ou_shift;
                const double expected = mk.s0[k] - mk.s0[k - 1] + mk.sw[k] * ew - mk.sw[k - 1] * w_prev +
                                        (mk.bridge ? mk.sg[k] * eg - mk.sg[k - 1] * gp : 0.0);
                const double innov = dS - expected;
                qv += innov * innov;
                qv_raw += dS * dS;
                if (mk.bridge) {
                    const double dg = g - gp;
                    const Psi ps = psi(tp);
                    drift_comp += (1.0 - gp) * ps.psi0 * h;
                    qv_comp += (1.0 - gp) * (1.0 - gp) * ps.psi1 * h;
                    gq += dg * dg;
                }
            }

            if (keep) {
                sp.w.push_back(w);
                sp.D.push_back(D);
                sp.S.push_back(S);
                sp.gamma.push_back(g);
                for (int i = 0; i < M; ++i) {
                    sp.theta[i].push_back(theta[i]);
                    sp.X[i].push_back(X[i]);
                    sp.L[i].push_back(L[i]);
                }
            }

            if (r < rec && nodes[r] == k) {
                auto& acc = out.acc;
                acc[Supply].add(r, w);
                acc[Premium].add(r, S - D);
                acc[Qv].add(r, qv);
                acc[QvRaw].add(r, qv_raw);
                acc[Gamma].add(r, g);
                acc[GammaDrift].add(r, g - drift_comp);
                acc[GammaQv].add(r, gq - qv_comp);
                for (int i = 0; i < M; ++i) {
                    acc[theta_slot(i)].add(r, theta[i]);
                    if (cfg.track_wealth) {
                        acc[wealth_slot(i, M)].add(r, X[i]);
                        acc[penalty_slot(i, M)].add(r, L[i]);
                    }
                }
                ++r;
            }

            if (k == n)
                break;
            for (int i = 0; i < M; ++i) {
                const double dev = theta[i] - mk.th0[i] - g * (mk.a[i] - mk.th0[i]);
                L[i] += mk.kappa[k] * dev * dev * h;
                theta_prev[i] = theta[i];
            }
            S_prev = S;
            w_prev = w;
            w = ou_mean * w + ou_shift + ou_sd * rng.normal();
            D += sqh * rng.normal();
        }

        double realized = 0.0;
        for (int i = 0; i < M; ++i)
            realized += X[i] - L[i];
        out.acc[Welfare].add(0, realized);
        for (auto& a : out.acc)
            a.next_path();
        if (keep)
            out.kept.push_back(std::move(sp));
    }
}

PathBundle run(const Market& mk, const SimConfig& cfg)
{
    if (cfg.n_steps != mk.n)
        throw Error(ErrorCode::GridMismatch, "simulation grid differs from the solution grid");
    if (cfg.n_paths <= 0 || cfg.stride < 1)
        throw Error(ErrorCode::InvalidArgument, "simulation needs n_paths > 0 and stride >= 1");

    PathBundle b;
    b.grid = mk.n;
    b.paths = cfg.n_paths;
    for (int k = 0; k <= mk.n; k += cfg.stride)
        b.nodes.push_back(k);
    if (b.nodes.back() != mk.n)
        b.nodes.push_back(mk.n);
    for (int k : b.nodes)
        b.times.push_back(static_cast<double>(k) / mk.n);

    const std::int64_t n_blocks = (cfg.n_paths + block_size - 1) / block_size;
    std::vector<Block> blocks(static_cast<std::size_t>(n_blocks));
    std::atomic<std::int64_t> next{0};
    auto worker = [&] {
        for (std::int64_t j = next++; j < n_blocks; j = next++) {
            const std::int64_t first = j * block_size;
            run_block(mk, cfg, b.nodes, first, std::min(first + block_size, cfg.n_paths),
                      blocks[static_cast<std::size_t>(j)]);
        }
    };
    int threads = cfg.threads > 0 ? cfg.threads : static_cast<int>(std::thread::hardware_concurrency());
    threads = std::clamp<int>(threads, 1, static_cast<int>(n_blocks));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t)
            pool.emplace_back(worker);
        for (auto& t : pool)
            t.join();
    }

    const std::size_t slots = blocks.front().acc.size();
    std::vector<SeriesStats> merged(slots);
    for (std::size_t s = 0; s < slots; ++s) {
        std::vector<Partial> parts;
        parts.reserve(blocks.size());
        for (const auto& blk : blocks)
            parts.push_back(to_partial(blk.acc[s]));
        merged[s] = finish(tree_merge(parts, 0, parts.size()));
    }
    for (auto& blk : blocks) {
        b.max_clearing_error = std::max(b.max_clearing_error, blk.clearing);
        for (auto& p : blk.kept)
            b.kept.push_back(std::move(p));
    }

    const int M = mk.investors;
    b.supply = std::move(merged[Supply]);
    b.premium = std::move(merged[Premium]);
    b.qv = std::move(merged[Qv]);
    b.qv_raw = std::move(merged[QvRaw]);
    if (mk.bridge) {
        b.gamma = std::move(merged[Gamma]);
        b.gamma_drift = std::move(merged[GammaDrift]);
        b.gamma_qv = std::move(merged[GammaQv]);
    }
    for (int i = 0; i < M; ++i)
        b.theta.push_back(std::move(merged[theta_slot(i)]));
    if (cfg.track_wealth) {
        b.welfare = std::move(merged[Welfare]);
        for (int i = 0; i < M; ++i) {
            b.wealth.push_back(std::move(merged[wealth_slot(i, M)]));
            b.penalty.push_back(std::move(merged[penalty_slot(i, M)]));
        }
    }
    return b;
}

void fill_common(Market& mk, const ModelParams& p, int n)
{
    mk.n = n;
    mk.investors = p.investors;
    mk.h = 1.0 / n;
    mk.w0 = p.w0;
    mk.alpha = p.alpha;
    mk.pi = p.pi;
    mk.eta = p.eta;
    mk.D0 = p.D0;
    mk.a = p.targets;
    mk.th0 = p.initial_holdings;
    for (int i = 0; i < p.investors; ++i)
        mk.cash.push_back(p.cash(i));
}

} // namespace

PathBundle simulate(const EquilibriumSolution& sol, const SimConfig& cfg)
{
    const auto& in = sol.inputs;
    const auto& p = in.params;
    const int n = sol.grid();
    const double M = p.investors;
    const double as = p.target_imbalance();
    Market mk;
    fill_common(mk, p, n);
    const auto prof = holdings_profile(sol);
    mk.s0.resize(n + 1);
    mk.sw.assign(sol.sigma_w.values().begin(), sol.sigma_w.values().end());
    mk.sg.assign(n + 1, 0.0);
    mk.kappa.assign(in.kappa.values().begin(), in.kappa.values().end());
    mk.gamma.assign(in.gamma.values().begin(), in.gamma.values().end());
    for (int k = 0; k <= n; ++k)
        mk.s0[k] = sol.g0[k] + sol.g[k] * as;
    mk.hb.assign(p.investors, std::vector<double>(n + 1));
    mk.hc.assign(p.investors, std::vector<double>(n + 1, 0.0));
    for (int i = 0; i < p.investors; ++i)
        for (int k = 0; k <= n; ++k)
            mk.hb[i][k] = prof.load_target[k] * (mk.a[i] - as / M) + prof.load_initial[k] * (mk.th0[i] - p.w0 / M);
    return run(mk, cfg);
}

PathBundle simulate(const VwapSolution& sol, const SimConfig& cfg)
{
    const auto& p = sol.params.base;
    const int n = sol.grid();
    const double M = p.investors;
    const double as = p.target_imbalance();
    const double rho = sol.params.rho;
    Market mk;
    fill_common(mk, p, n);
    mk.bridge = true;
    mk.rho_imbalance = rho * as;
    mk.s0.assign(sol.g0.values().begin(), sol.g0.values().end());
    mk.sw.assign(sol.sigma_w.values().begin(), sol.sigma_w.values().end());
    mk.sg.resize(n + 1);
    for (int k = 0; k <= n; ++k)
        mk.sg[k] = sol.sigma_gamma[k] * as;
    mk.kappa.assign(sol.kappa.values().begin(), sol.kappa.values().end());
    mk.gamma.assign(n + 1, 0.0);
    mk.hb.assign(p.investors, std::vector<double>(n + 1, 0.0));
    mk.hc.assign(p.investors, std::vector<double>(n + 1));
    for (int i = 0; i < p.investors; ++i)
        for (int k = 0; k <= n; ++k) {
            const double kap = sol.kappa[k];
            mk.hc[i][k] = 2.0 * kap / (2.0 * kap - sol.mu1[k]) * (mk.a[i] - as / M) + rho * as / M;
        }
    return run(mk, cfg);
}

std::vector<StatRow> liquidity_premium_stats(const PathBundle& b, const EquilibriumSolution& sol)
{
    const auto& p = sol.params();
    const double as = p.target_imbalance();
    std::vector<StatRow> rows;
    const double n = static_cast<double>(b.premium.count);
    for (std::size_t j = 0; j < b.nodes.size(); ++j) {
        const int k = b.nodes[j];
        const double t = b.times[j];
        const auto sm = supply_moments(p, t);
        const double sd = b.premium.sd(j);
        rows.push_back({"premium_mean", t, b.premium.mean[j], b.premium.stderr_mean(j)});
        rows.push_back({"premium_sd", t, sd, n > 1 ? sd / std::sqrt(2.0 * (n - 1)) : 0.0});
        rows.push_back({"premium_mean_analytic", t, sol.g0[k] + sol.g[k] * as + sol.sigma_w[k] * sm.mean, 0.0});
        rows.push_back({"premium_sd_analytic", t, std::abs(sol.sigma_w[k]) * std::sqrt(sm.variance), 0.0});
    }
    return rows;
}

std::vector<StatRow> twap_deviation_stats(const PathBundle& b, const EquilibriumSolution& sol)
{
    const auto& in = sol.inputs;
    const auto& p = in.params;
    const double M = p.investors;
    const double as = p.target_imbalance();
    const auto prof = holdings_profile(sol);
    std::vector<StatRow> rows;
    for (std::size_t j = 0; j < b.nodes.size(); ++j) {
        const int k = b.nodes[j];
        const double t = b.times[j];
        const double ew = supply_moments(p, t).mean;
        double avg = 0.0;
        for (int i = 0; i < p.investors; ++i) {
            const auto who = investor(p, i);
            const double target = who.initial + in.gamma[k] * (who.target - who.initial);
            const double analytic = ew / M + prof.load_target[k] * (who.target - as / M) +
                                    prof.load_initial[k] * (who.initial - p.w0 / M) - target;
            const std::string id = std::to_string(i);
            rows.push_back({"deviation_" + id, t, b.theta[static_cast<std::size_t>(i)].mean[j] - target,
                            b.theta[static_cast<std::size_t>(i)].stderr_mean(j)});
            rows.push_back({"deviation_analytic_" + id, t, analytic, 0.0});
            avg += analytic / M;
        }
        rows.push_back({"deviation_average_analytic", t, avg, 0.0});
    }
    return rows;
}

std::vector<StatRow> holdings_stats(const PathBundle& b, const EquilibriumSolution& sol)
{
    const auto& p = sol.params();
    const double M = p.investors;
    const double as = p.target_imbalance();
    const auto prof = holdings_profile(sol);
    std::vector<StatRow> rows;
    const double n = static_cast<double>(b.supply.count);
    for (std::size_t j = 0; j < b.nodes.size(); ++j) {
        const int k = b.nodes[j];
        const double t = b.times[j];
        const auto sm = supply_moments(p, t);
        for (int i = 0; i < p.investors; ++i) {
            const auto who = investor(p, i);
            const auto& th = b.theta[static_cast<std::size_t>(i)];
            const std::string id = std::to_string(i);
            rows.push_back({"theta_mean_" + id, t, th.mean[j], th.stderr_mean(j)});
            rows.push_back({"theta_var_" + id, t, th.variance[j],
                            n > 1 ? th.variance[j] * std::sqrt(2.0 / (n - 1)) : 0.0});
            rows.push_back({"theta_mean_analytic_" + id, t,
                            sm.mean / M + prof.load_target[k] * (who.target - as / M) +
                                prof.load_initial[k] * (who.initial - p.w0 / M),
                            0.0});
            rows.push_back({"theta_var_analytic_" + id, t, sm.variance / (M * M), 0.0});
        }
    }
    return rows;
}

double expected_quadratic_variation(const EquilibriumSolution& sol)
{
    const double eta2 = sol.params().eta * sol.params().eta;
    std::vector<double> f(sol.sigma_w.values().begin(), sol.sigma_w.values().end());
    for (double& v : f)
        v = v * v * eta2 + 1.0;
    return quad::integral(f);
}

std::vector<StatRow> quadratic_variation_stats(const PathBundle& b, const EquilibriumSolution& sol)
{
    const std::size_t last = b.nodes.size() - 1;
    return {{"qv", 1.0, b.qv.mean[last], b.qv.stderr_mean(last)},
            {"qv_raw", 1.0, b.qv_raw.mean[last], b.qv_raw.stderr_mean(last)},
            {"qv_analytic", 1.0, expected_quadratic_variation(sol), 0.0}};
}

StatRow monte_carlo_welfare(const PathBundle& b)
{
    if (b.welfare.count == 0)
        throw Error(ErrorCode::InvalidArgument, "welfare needs a simulation with wealth tracking");
    return {"welfare", 1.0, b.welfare.mean[0], b.welfare.stderr_mean(0)};
}

void write_long_csv(std::ostream& out, const std::vector<StatRow>& rows, const std::string& comment)
{
    if (!comment.empty())
        out << "# " << comment << '\n';
    out << "stat,t,value,stderr\n";
    const auto old = out.precision(12);
    for (const auto& r : rows)
        out << r.stat << ',' << r.t << ',' << r.value << ',' << r.stderr_value << '\n';
    out.precision(old);
}

} // namespace twap
