#pragma once

#include <functional>
#include <span>
#include <vector>

namespace twap {

/// A point of the trading day. `remaining` is 1 - t, carried separately so
/// that functions diverging at the close can be evaluated accurately there.
struct Instant {
    double t;
    double remaining;

    static Instant at(double t) noexcept { return {t, 1.0 - t}; }
    static Instant before_close(double remaining) noexcept { return {1.0 - remaining, remaining}; }
};

/// Deterministic function of t in [0,1] sampled on the uniform grid t_k = k/N.
///
/// A closed-form tagged function also carries an evaluator so it can be read
/// off the grid (Runge-Kutta stages, refinement studies). Grid-sampled
/// functions are linearly interpolated between nodes.
///
/// When `singular_at_one()` holds the function behaves like c (1-t)^-p near
/// the close, with p = `tail_exponent()` in [0,1). The stored node at t = 1 is
/// then the value at t = 1 - 1/(2N).
class TimeFunction {
public:
    enum class Kind { GridSampled, ClosedForm };
    using Evaluator = std::function<double(Instant)>;

    TimeFunction() = default;

    static TimeFunction sampled(std::vector<double> values, bool singular_at_one = false,
                                double tail_exponent = 0.0);
    static TimeFunction closed_form(Evaluator f, int n, bool singular_at_one = false,
                                    double tail_exponent = 0.0);
    static TimeFunction constant(double value, int n);

    Kind kind() const noexcept { return kind_; }
    bool has_evaluator() const noexcept { return kind_ == Kind::ClosedForm; }
    bool singular_at_one() const noexcept { return singular_; }
    double tail_exponent() const noexcept { return tail_exponent_; }

    int grid() const noexcept { return static_cast<int>(values_.size()) - 1; }
    double step() const noexcept { return 1.0 / grid(); }
    double time(int k) const noexcept { return static_cast<double>(k) / grid(); }

    std::span<const double> values() const noexcept { return values_; }
    double operator[](int k) const { return values_[static_cast<std::size_t>(k)]; }
    double front() const { return values_.front(); }
    double back() const { return values_.back(); }

    double operator()(Instant at) const;
    double operator()(double t) const { return (*this)(Instant::at(t)); }

    /// Same function re-sampled on another grid. Requires an evaluator.
    TimeFunction on_grid(int n) const;

    /// Pointwise image under `op`, keeping the evaluator when there is one.
    TimeFunction map(std::function<double(double)> op) const;

private:
    Kind kind_ = Kind::GridSampled;
    std::vector<double> values_;
    Evaluator eval_;
    bool singular_ = false;
    double tail_exponent_ = 0.0;
};

/// Grid node k of an N-grid as an Instant, honouring the near-close convention
/// for singular functions.
Instant grid_instant(int k, int n, bool singular);

} // namespace twap
