#pragma once

#include "twap/time_function.hpp"

#include <functional>
#include <span>
#include <vector>

namespace twap::quad {

/// Backward cumulative integrals I_k = int_{t_k}^1 exp(decay (t_k - u)) f(u) du
/// on the uniform grid carrying `f`.
///
/// With tail_exponent p > 0 the integrand is treated as (1-u)^-p r(u) with r
/// piecewise linear, and every cell is integrated exactly against the weight
/// (1-u)^-p. The node f[N] is ignored in that case; r(1) is extrapolated.
std::vector<double> tail_integrals(std::span<const double> f, double tail_exponent = 0.0,
                                   double decay = 0.0);

/// int_0^1 f(u) du, same conventions as tail_integrals.
double integral(std::span<const double> f, double tail_exponent = 0.0);

/// Central differences on the uniform grid, one-sided second order at the ends.
std::vector<double> derivative(std::span<const double> f);

using State = std::vector<double>;
using Rhs = std::function<void(Instant, const State&, State&)>;

struct BackwardOptions {
    /// Integrate in s with t = 1 - s^q so a (1-t)^-p forcing becomes regular.
    bool singular = false;
    double tail_exponent = 0.0;
    /// Cells with t >= 1 - tail_fraction are split into tail_substeps substeps.
    double tail_fraction = 0.01;
    int tail_substeps = 100;
    /// Components monitored for divergence; empty disables the check.
    std::vector<std::size_t> watch;
    double divergence_threshold = 1e8;
};

struct BackwardResult {
    /// states[k] is the solution at t_k; rows past the blow-up are left empty.
    std::vector<State> states;
    bool diverged = false;
    double divergence_time = 1.0;
};

/// Classical fixed-step RK4 run from y(1) = terminal down to t = 0 on an N-grid.
BackwardResult rk4_backward(const Rhs& rhs, const State& terminal, int n, const BackwardOptions& opts = {});

/// Column j of a backward result as a grid-sampled function.
std::vector<double> column(const BackwardResult& r, std::size_t j);

} // namespace twap::quad
