#include "twap/time_function.hpp"

#include "twap/errors.hpp"

#include <algorithm>
#include <cmath>

namespace twap {

namespace {

void check_grid(int n)
{
    if (n < 2)
        throw Error(ErrorCode::InvalidArgument, "time grid needs N >= 2");
}

void check_interior(const std::vector<double>& v)
{
    for (std::size_t k = 1; k + 1 < v.size(); ++k)
        if (!std::isfinite(v[k]))
            throw Error(ErrorCode::InvalidArgument,
                        "time function is not finite at interior node " + std::to_string(k));
}

} // namespace

Instant grid_instant(int k, int n, bool singular)
{
    if (k == n) {
        if (singular)
            return Instant::before_close(0.5 / n);
        return {1.0, 0.0};
    }
    const double t = static_cast<double>(k) / n;
    return {t, static_cast<double>(n - k) / n};
}

TimeFunction TimeFunction::sampled(std::vector<double> values, bool singular_at_one, double tail_exponent)
{
    check_grid(static_cast<int>(values.size()) - 1);
    check_interior(values);
    if (tail_exponent < 0.0 || tail_exponent >= 1.0)
        throw Error(ErrorCode::InvalidArgument, "tail exponent must lie in [0,1)");
    TimeFunction f;
    f.kind_ = Kind::GridSampled;
    f.values_ = std::move(values);
    f.singular_ = singular_at_one;
    f.tail_exponent_ = singular_at_one ? tail_exponent : 0.0;
    return f;
}

TimeFunction TimeFunction::closed_form(Evaluator eval, int n, bool singular_at_one, double tail_exponent)
{
    check_grid(n);
    if (tail_exponent < 0.0 || tail_exponent >= 1.0)
        throw Error(ErrorCode::InvalidArgument, "tail exponent must lie in [0,1)");
    TimeFunction f;
    f.kind_ = Kind::ClosedForm;
    f.values_.resize(static_cast<std::size_t>(n) + 1);
    for (int k = 0; k <= n; ++k)
        f.values_[static_cast<std::size_t>(k)] = eval(grid_instant(k, n, singular_at_one));
    check_interior(f.values_);
    f.eval_ = std::move(eval);
    f.singular_ = singular_at_one;
    f.tail_exponent_ = singular_at_one ? tail_exponent : 0.0;
    return f;
}

TimeFunction TimeFunction::constant(double value, int n)
{
    return closed_form([value](Instant) { return value; }, n);
}

double TimeFunction::operator()(Instant at) const
{
    if (eval_) {
        if (singular_ && at.remaining <= 0.0)
            return values_.back();
        return eval_(at);
    }
    const int n = grid();
    const double x = std::clamp(at.t, 0.0, 1.0) * n;
    const int k = std::min(static_cast<int>(x), n - 1);
    const double w = x - k;
    return (1.0 - w) * values_[static_cast<std::size_t>(k)] + w * values_[static_cast<std::size_t>(k) + 1];
}

TimeFunction TimeFunction::on_grid(int n) const
{
    if (!eval_)
        throw Error(ErrorCode::InvalidArgument, "re-gridding needs a closed-form function");
    return closed_form(eval_, n, singular_, tail_exponent_);
}

TimeFunction TimeFunction::map(std::function<double(double)> op) const
{
    if (eval_) {
        auto inner = eval_;
        return closed_form([inner, op](Instant at) { return op(inner(at)); }, grid(), singular_,
                           tail_exponent_);
    }
    std::vector<double> v(values_.size());
    std::transform(values_.begin(), values_.end(), v.begin(), op);
    return sampled(std::move(v), singular_, tail_exponent_);
}

} // namespace twap
