#include "twap/model.hpp"

#include "twap/calibrate.hpp"
#include "twap/errors.hpp"
#include "twap/quadrature.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace twap {

double TargetMoments::aggregate_mean() const
{
    return std::accumulate(mean.begin(), mean.end(), 0.0);
}

double TargetMoments::sum_second() const
{
    return std::accumulate(second.begin(), second.end(), 0.0);
}

double TargetMoments::dispersion() const
{
    return aggregate_second - static_cast<double>(second.size()) * sum_second();
}

TargetMoments TargetMoments::iid(int investors, double m, double s)
{
    TargetMoments tm;
    tm.mean.assign(static_cast<std::size_t>(investors), m);
    tm.second.assign(static_cast<std::size_t>(investors), s);
    // E[(sum a_i)^2] = M s + M (M - 1) m^2
    tm.aggregate_second = investors * s + investors * (investors - 1.0) * m * m;
    return tm;
}

double ModelParams::target_imbalance() const
{
    return std::accumulate(targets.begin(), targets.end(), 0.0);
}

double ModelParams::cash(int i) const
{
    return initial_cash.empty() ? 0.0 : initial_cash[static_cast<std::size_t>(i)];
}

void ModelParams::validate() const
{
    auto fail = [](const std::string& msg) { throw Error(ErrorCode::InvalidArgument, msg); };
    if (investors < 1)
        fail("need at least one strategic investor");
    const auto m = static_cast<std::size_t>(investors);
    if (targets.size() != m)
        fail("targets must list one value per investor");
    if (initial_holdings.size() != m)
        fail("initial holdings must list one value per investor");
    if (!initial_cash.empty() && initial_cash.size() != m)
        fail("initial cash must be empty or list one value per investor");
    if (!(eta >= 0.0))
        fail("supply volatility must be nonnegative");
    for (double v : {w0, alpha, pi, eta, phi0, phi1, D0})
        if (!std::isfinite(v))
            fail("model scalars must be finite");
    const double held = std::accumulate(initial_holdings.begin(), initial_holdings.end(), 0.0);
    if (std::abs(held - w0) > 1e-9 * std::max(1.0, std::abs(w0))) {
        std::ostringstream os;
        os << "initial holdings sum to " << held << " but w0 = " << w0;
        fail(os.str());
    }
    if (!moments.mean.empty() || !moments.second.empty()) {
        if (moments.mean.size() != m || moments.second.size() != m)
            fail("target moments must list one value per investor");
        for (std::size_t i = 0; i < m; ++i)
            if (moments.second[i] < moments.mean[i] * moments.mean[i] - 1e-12)
                fail("target second moment below squared mean");
    }
}

ModelParams ModelParams::reference_day()
{
    ModelParams p;
    p.investors = 10;
    p.w0 = 10.0;
    p.alpha = -1.0;
    p.pi = 0.0;
    p.eta = 1.0;
    p.phi0 = 0.0;
    p.phi1 = 0.0;
    p.D0 = 20.0;
    p.targets.assign(10, 0.0);
    p.initial_holdings.assign(10, 1.0);
    p.initial_cash.assign(10, 0.0);
    p.moments = TargetMoments::iid(10, 0.0, 1.0);
    return p;
}

std::string_view profile_name(PenaltyProfile p)
{
    switch (p) {
    case PenaltyProfile::Constant: return "k1";
    case PenaltyProfile::Linear: return "k2";
    case PenaltyProfile::PowerTail: return "k3";
    case PenaltyProfile::Piecewise: return "k4";
    }
    return "?";
}

namespace {

constexpr double kTailExponent = 0.25;

double power_tail(double remaining)
{
    return 9.0 / 8.0 * std::pow(remaining, -kTailExponent);
}

} // namespace

TimeFunction builtin_kappa(PenaltyProfile profile, int n)
{
    switch (profile) {
    case PenaltyProfile::Constant:
        return TimeFunction::closed_form([](Instant) { return 1.0; }, n);
    case PenaltyProfile::Linear:
        return TimeFunction::closed_form([](Instant at) { return 1.0 + at.t; }, n);
    case PenaltyProfile::PowerTail:
        return TimeFunction::closed_form([](Instant at) { return power_tail(at.remaining); }, n, true,
                                         kTailExponent);
    case PenaltyProfile::Piecewise:
        return TimeFunction::closed_form(
            [](Instant at) {
                if (at.t <= 0.75)
                    return 0.0002;
                if (at.t <= 0.95)
                    return 2.3791 + 11.8954 * (at.t - 0.95);
                return power_tail(at.remaining);
            },
            n, true, kTailExponent);
    }
    throw Error(ErrorCode::InvalidArgument, "unknown penalty profile");
}

TimeFunction linear_target_ratio(double level, double slope, int n)
{
    if (level < 0.0 || level + slope < 0.0)
        throw Error(ErrorCode::InvalidArgument, "target ratio must be nonnegative");
    return TimeFunction::closed_form([level, slope](Instant at) { return level + slope * at.t; }, n);
}

std::string_view selector_name(const EquilibriumSelector& s)
{
    struct Visitor {
        std::string_view operator()(const selector::Radner&) const { return "radner"; }
        std::string_view operator()(const selector::Vayanos&) const { return "vayanos"; }
        std::string_view operator()(const selector::WelfareMax&) const { return "welfare"; }
        std::string_view operator()(const selector::Custom&) const { return "custom"; }
        std::string_view operator()(const selector::Calibrated&) const { return "calibrated"; }
    };
    return std::visit(Visitor{}, s);
}

double welfare_cubic_root(double gamma, double t, const ModelParams& p)
{
    if (gamma <= 0.0 || t <= 0.0)
        return gamma;
    const double c1 = p.moments.dispersion();
    const double c2 = t * (p.eta * p.eta + p.alpha * p.alpha * t + p.alpha * p.w0);
    auto slope = [&](double y) { return c1 * y * y * y - gamma * (c1 * y * y + c2); };
    double lo = gamma;
    double hi = 2.0 * gamma;
    if (!(slope(lo) > 0.0 && slope(hi) < 0.0))
        throw Error(ErrorCode::WelfareNonexistence, "first-order condition has no root in (gamma, 2 gamma)");
    while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        if (slope(mid) > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

double welfare_ratio(double gamma, double t, const ModelParams& p)
{
    if (gamma <= 0.0)
        return 0.0;
    const double y = welfare_cubic_root(gamma, t, p);
    return 2.0 * (y - gamma) / y;
}

void check_welfare_conditions(const ModelParams& p, const TimeFunction& gamma)
{
    if (p.alpha * p.w0 >= 0.0)
        throw Error(ErrorCode::WelfareNonexistence, "no welfare maximizer when alpha w0 >= 0");
    const double c1 = p.moments.dispersion();
    const int n = gamma.grid();
    for (int k = 1; k <= n; ++k) {
        const double t = gamma.time(k);
        const double g = gamma[k];
        const double c2 = t * (p.eta * p.eta + p.alpha * p.alpha * t + p.alpha * p.w0);
        if (!(4.0 * g * g * c1 < c2 && c2 < 0.0)) {
            std::ostringstream os;
            os << "welfare existence conditions fail at t = " << t;
            throw Error(ErrorCode::WelfareNonexistence, os.str());
        }
    }
}

void check_second_order(const TimeFunction& kappa, const TimeFunction& mu1)
{
    if (kappa.grid() != mu1.grid())
        throw Error(ErrorCode::GridMismatch, "kappa and mu1 live on different grids");
    for (int k = 0; k <= kappa.grid(); ++k) {
        if (!(kappa[k] > 0.0)) {
            std::ostringstream os;
            os << "penalty severity must be positive, got " << kappa[k] << " at t = " << kappa.time(k);
            throw Error(ErrorCode::InvalidArgument, os.str());
        }
        if (!(mu1[k] < kappa[k])) {
            std::ostringstream os;
            os << "mu1 = " << mu1[k] << " >= kappa = " << kappa[k] << " at t = " << kappa.time(k);
            throw Error(ErrorCode::SecondOrderViolation, os.str());
        }
    }
}

double square_integral(const TimeFunction& kappa, const TimeFunction& mu1)
{
    const double p = std::max(kappa.tail_exponent(), mu1.tail_exponent());
    if (2.0 * p >= 1.0)
        throw Error(ErrorCode::QuadratureDivergence, "penalty tail is not square integrable");
    std::vector<double> f(kappa.values().size());
    for (std::size_t k = 0; k < f.size(); ++k)
        f[k] = kappa.values()[k] * kappa.values()[k] + mu1.values()[k] * mu1.values()[k];
    const double v = quad::integral(f, 2.0 * p);
    if (!std::isfinite(v))
        throw Error(ErrorCode::QuadratureDivergence, "square integral is not finite");
    return v;
}

namespace {

bool welfare_regime(const ModelParams& p)
{
    if (p.pi != 0.0 || p.phi0 != 0.0 || p.phi1 != 0.0)
        return false;
    const double share = p.w0 / p.investors;
    for (double h : p.initial_holdings)
        if (std::abs(h - share) > 1e-12 * std::max(1.0, std::abs(share)))
            return false;
    return true;
}

TimeFunction proportional_to_kappa(const TimeFunction& kappa, std::function<double(Instant)> ratio)
{
    if (kappa.has_evaluator()) {
        return TimeFunction::closed_form([kappa, ratio](Instant at) { return ratio(at) * kappa(at); },
                                         kappa.grid(), kappa.singular_at_one(), kappa.tail_exponent());
    }
    std::vector<double> v(kappa.values().size());
    for (int k = 0; k <= kappa.grid(); ++k)
        v[k] = ratio(grid_instant(k, kappa.grid(), kappa.singular_at_one())) * kappa[k];
    return TimeFunction::sampled(std::move(v), kappa.singular_at_one(), kappa.tail_exponent());
}

} // namespace

TimeFunction resolve_mu1(const EquilibriumSelector& sel, const ModelParams& params, const TimeFunction& kappa,
                         const TimeFunction& gamma, SecondOrderCheck check)
{
    if (kappa.grid() != gamma.grid())
        throw Error(ErrorCode::GridMismatch, "kappa and gamma live on different grids");

    struct Visitor {
        const ModelParams& params;
        const TimeFunction& kappa;
        const TimeFunction& gamma;

        TimeFunction operator()(const selector::Radner&) const
        {
            return proportional_to_kappa(kappa, [](Instant) { return 0.0; });
        }
        TimeFunction operator()(const selector::Vayanos&) const
        {
            if (params.investors < 3)
                throw Error(ErrorCode::VayanosTooFewInvestors, "demand-curve equilibrium needs M >= 3");
            const double r = 2.0 / (2.0 - params.investors);
            return proportional_to_kappa(kappa, [r](Instant) { return r; });
        }
        TimeFunction operator()(const selector::WelfareMax&) const
        {
            if (!welfare_regime(params))
                throw Error(ErrorCode::RestrictionViolation,
                            "welfare maximizer needs pi = 0, phi0 = phi1 = 0 and equal initial holdings");
            if (params.eta == 0.0 && params.alpha == 0.0)
                return proportional_to_kappa(kappa, [](Instant) { return 0.0; });
            check_welfare_conditions(params, gamma);
            const ModelParams p = params;
            const TimeFunction g = gamma;
            return proportional_to_kappa(kappa, [p, g](Instant at) { return welfare_ratio(g(at), at.t, p); });
        }
        TimeFunction operator()(const selector::Custom& c) const
        {
            if (c.mu1.grid() != kappa.grid())
                throw Error(ErrorCode::GridMismatch, "custom mu1 grid differs from kappa grid");
            return c.mu1;
        }
        TimeFunction operator()(const selector::Calibrated& c) const
        {
            return implied_mu1(c.curve, params, kappa).mu1;
        }
    };

    TimeFunction mu1 = std::visit(Visitor{params, kappa, gamma}, sel);
    if (check == SecondOrderCheck::Linear)
        check_second_order(kappa, mu1);
    return mu1;
}

} // namespace twap
