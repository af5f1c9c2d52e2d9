#include "scenario.hpp"

#include "twap/calibrate.hpp"
#include "twap/errors.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace twap::cli {

namespace {

const std::map<std::string, std::set<std::string>>& schema()
{
    static const std::map<std::string, std::set<std::string>> keys = {
        {"model", {"investors", "w0", "alpha", "pi", "eta", "phi0", "phi1", "D0", "targets", "initial_holdings",
                   "initial_cash", "target_mean", "target_second", "aggregate_second"}},
        {"penalty", {"profile", "values"}},
        {"target", {"level", "slope"}},
        {"selector", {"kind", "ratio"}},
        {"simulation", {"paths", "seed", "stride", "threads"}},
        {"vwap", {"rho"}},
        {"exp", {"tau"}},
        {"calibrate", {"lambda_file"}},
        {"output", {"dir", "grid"}},
    };
    return keys;
}

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(const std::string& msg)
{
    throw Error(ErrorCode::ConfigError, msg);
}

double to_double(const std::string& key, const std::string& raw)
{
    double v = 0.0;
    const auto* end = raw.data() + raw.size();
    auto [ptr, ec] = std::from_chars(raw.data(), end, v);
    if (ec != std::errc{} || ptr != end)
        fail(key + ": not a number: '" + raw + "'");
    return v;
}

template <class Int>
Int to_int(const std::string& key, const std::string& raw)
{
    Int v = 0;
    const auto* end = raw.data() + raw.size();
    auto [ptr, ec] = std::from_chars(raw.data(), end, v);
    if (ec != std::errc{} || ptr != end)
        fail(key + ": not an integer: '" + raw + "'");
    return v;
}

class Section {
public:
    Section(const IniTable& t, const std::string& name)
    {
        if (auto it = t.find(name); it != t.end())
            kv_ = &it->second;
        name_ = name;
    }

    bool present() const { return kv_ != nullptr; }
    bool has(const std::string& k) const { return kv_ && kv_->count(k); }
    const std::string& raw(const std::string& k) const { return kv_->at(k); }

    void read(const std::string& k, double& v) const
    {
        if (has(k))
            v = to_double(name_ + "." + k, raw(k));
    }
    template <class Int>
    void read_int(const std::string& k, Int& v) const
    {
        if (has(k))
            v = to_int<Int>(name_ + "." + k, raw(k));
    }

private:
    const std::map<std::string, std::string>* kv_ = nullptr;
    std::string name_;
};

} // namespace

IniTable parse_ini(std::istream& in)
{
    IniTable table;
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto cut = line.find_first_of("#;");
        line = trim(cut == std::string::npos ? line : line.substr(0, cut));
        if (line.empty())
            continue;
        const std::string where = "line " + std::to_string(lineno) + ": ";
        if (line.front() == '[') {
            if (line.back() != ']')
                fail(where + "unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (!schema().count(section))
                fail(where + "unknown section [" + section + "]");
            table[section];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            fail(where + "expected key = value");
        if (section.empty())
            fail(where + "key outside of a section");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!schema().at(section).count(key))
            fail(where + "unknown key '" + key + "' in [" + section + "]");
        if (!table[section].emplace(key, value).second)
            fail(where + "duplicate key '" + key + "'");
    }
    return table;
}

std::uint64_t config_hash(const IniTable& table)
{
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (const auto& [sec, kv] : table)
        for (const auto& [k, v] : kv) {
            for (char c : sec + "." + k + "=" + v + "\n") {
                h ^= static_cast<unsigned char>(c);
                h *= 0x100000001b3ull;
            }
        }
    return h;
}

PenaltyProfile parse_profile(const std::string& id)
{
    if (id == "k1")
        return PenaltyProfile::Constant;
    if (id == "k2")
        return PenaltyProfile::Linear;
    if (id == "k3")
        return PenaltyProfile::PowerTail;
    if (id == "k4")
        return PenaltyProfile::Piecewise;
    fail("penalty.profile must be one of k1, k2, k3, k4, got '" + id + "'");
}

std::vector<double> parse_list(const std::string& raw)
{
    std::vector<double> out;
    std::stringstream ss(raw);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(to_double("list", trim(item)));
    return out;
}

Scenario scenario_from_table(const IniTable& t, const std::filesystem::path& base_dir)
{
    Scenario s;
    s.hash = config_hash(t);

    Section model(t, "model");
    auto& p = s.model;
    p.investors = 10;
    p.w0 = 10.0;
    p.alpha = -1.0;
    p.pi = 0.0;
    p.eta = 1.0;
    p.D0 = 20.0;
    model.read_int("investors", p.investors);
    if (p.investors < 1)
        fail("model.investors must be positive");
    model.read("w0", p.w0);
    model.read("alpha", p.alpha);
    model.read("pi", p.pi);
    model.read("eta", p.eta);
    model.read("phi0", p.phi0);
    model.read("phi1", p.phi1);
    model.read("D0", p.D0);
    const auto m = static_cast<std::size_t>(p.investors);
    auto list = [&](const std::string& key, double fill) {
        if (!model.has(key))
            return std::vector<double>(m, fill);
        auto v = parse_list(model.raw(key));
        if (v.size() != m)
            fail("model." + key + " needs " + std::to_string(m) + " entries");
        return v;
    };
    p.targets = list("targets", 0.0);
    p.initial_holdings = list("initial_holdings", p.w0 / p.investors);
    p.initial_cash = list("initial_cash", 0.0);
    double mean = 0.0, second = 1.0;
    model.read("target_mean", mean);
    model.read("target_second", second);
    p.moments = TargetMoments::iid(p.investors, mean, second);
    model.read("aggregate_second", p.moments.aggregate_second);

    Section pen(t, "penalty");
    if (pen.present()) {
        const bool by_id = pen.has("profile"), by_grid = pen.has("values");
        if (by_id && by_grid)
            fail("penalty: give either profile or values, not both");
        if (by_id || by_grid) {
            PenaltySpec spec;
            if (by_id)
                spec.profile = parse_profile(pen.raw("profile"));
            else {
                spec.values = parse_list(pen.raw("values"));
                if (spec.values.size() < 2)
                    fail("penalty.values needs at least two samples");
            }
            s.penalty = std::move(spec);
        }
    }

    Section tgt(t, "target");
    tgt.read("level", s.gamma_level);
    tgt.read("slope", s.gamma_slope);

    Section sel(t, "selector");
    if (sel.has("kind"))
        s.selector = sel.raw("kind");
    static const std::set<std::string> kinds = {"radner", "vayanos", "welfare", "custom", "calibrated"};
    if (!kinds.count(s.selector))
        fail("selector.kind must be radner, vayanos, welfare, custom or calibrated");
    sel.read("ratio", s.mu1_ratio);

    Section cal(t, "calibrate");
    if (cal.has("lambda_file")) {
        s.lambda_file = cal.raw("lambda_file");
        if (s.lambda_file.is_relative() && !base_dir.empty())
            s.lambda_file = base_dir / s.lambda_file;
    }

    Section sim(t, "simulation");
    sim.read_int("paths", s.paths);
    sim.read_int("seed", s.seed);
    sim.read_int("stride", s.stride);
    sim.read_int("threads", s.threads);

    Section(t, "vwap").read("rho", s.rho);
    Section(t, "exp").read("tau", s.tau);

    Section out(t, "output");
    if (out.has("dir"))
        s.out_dir = out.raw("dir");
    out.read_int("grid", s.grid);
    if (s.grid < 2)
        fail("output.grid must be at least 2");
    if (s.paths < 0 || s.stride < 1 || s.threads < 0)
        fail("simulation: paths >= 0, stride >= 1 and threads >= 0 required");
    return s;
}

Scenario load_scenario(const std::filesystem::path& file)
{
    std::ifstream in(file);
    if (!in)
        fail("cannot open config file " + file.string());
    return scenario_from_table(parse_ini(in), file.parent_path());
}

TimeFunction scenario_kappa(const Scenario& s, int n)
{
    if (!s.penalty)
        throw Error(ErrorCode::MissingPenalty, "the scenario has no [penalty] block");
    if (s.penalty->profile)
        return builtin_kappa(*s.penalty->profile, n);
    const auto& v = s.penalty->values;
    const double segs = static_cast<double>(v.size() - 1);
    std::vector<double> grid(n + 1);
    for (int k = 0; k <= n; ++k) {
        const double x = static_cast<double>(k) / n * segs;
        const auto j = std::min(static_cast<std::size_t>(x), v.size() - 2);
        const double w = x - static_cast<double>(j);
        grid[k] = (1.0 - w) * v[j] + w * v[j + 1];
    }
    return TimeFunction::sampled(std::move(grid));
}

TimeFunction scenario_gamma(const Scenario& s, int n)
{
    return linear_target_ratio(s.gamma_level, s.gamma_slope, n);
}

EquilibriumSelector scenario_selector(const Scenario& s, const TimeFunction& kappa)
{
    if (s.selector == "radner")
        return selector::Radner{};
    if (s.selector == "vayanos")
        return selector::Vayanos{};
    if (s.selector == "welfare")
        return selector::WelfareMax{};
    if (s.selector == "custom")
        return selector::Custom{kappa.map([r = s.mu1_ratio](double k) { return r * k; })};
    if (s.lambda_file.empty())
        fail("calibrated selector needs calibrate.lambda_file");
    std::ifstream in(s.lambda_file);
    if (!in)
        fail("cannot open lambda file " + s.lambda_file.string());
    return selector::Calibrated{read_lambda_csv(in, kappa.grid())};
}

} // namespace twap::cli
