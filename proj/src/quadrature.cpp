#include "twap/quadrature.hpp"

#include "twap/errors.hpp"

#include <cmath>

namespace twap::quad {

namespace {

struct CellWeights {
    double left;
    double right;
};

// Exact weights of int_a^b (1-u)^-p l(u) du for the linear interpolant l of
// the endpoint values, in terms of v = 1-u.
CellWeights singular_weights(double va, double vb, double p, double h)
{
    const double i0 = (std::pow(va, 1.0 - p) - std::pow(vb, 1.0 - p)) / (1.0 - p);
    const double i1 = (std::pow(va, 2.0 - p) - std::pow(vb, 2.0 - p)) / (2.0 - p);
    return {(i1 - vb * i0) / h, (va * i0 - i1) / h};
}

} // namespace

std::vector<double> tail_integrals(std::span<const double> f, double p, double decay)
{
    const int n = static_cast<int>(f.size()) - 1;
    if (n < 2)
        throw Error(ErrorCode::InvalidArgument, "quadrature needs N >= 2");
    const double h = 1.0 / n;
    const double damp = std::exp(-decay * h);
    std::vector<double> out(f.size(), 0.0);

    if (p == 0.0) {
        for (int k = n - 1; k >= 0; --k)
            out[k] = 0.5 * h * (f[k] + damp * f[k + 1]) + damp * out[k + 1];
    } else {
        std::vector<double> r(f.size());
        for (int k = 0; k < n; ++k)
            r[k] = f[k] * std::pow(static_cast<double>(n - k) / n, p);
        r[n] = 2.0 * r[n - 1] - r[n - 2];
        for (int k = n - 1; k >= 0; --k) {
            const auto w = singular_weights(static_cast<double>(n - k) / n,
                                            static_cast<double>(n - k - 1) / n, p, h);
            out[k] = w.left * r[k] + w.right * damp * r[k + 1] + damp * out[k + 1];
        }
    }
    for (double v : out)
        if (!std::isfinite(v))
            throw Error(ErrorCode::QuadratureDivergence, "tail integral is not finite");
    return out;
}

double integral(std::span<const double> f, double p)
{
    return tail_integrals(f, p).front();
}

std::vector<double> derivative(std::span<const double> f)
{
    const int n = static_cast<int>(f.size()) - 1;
    if (n < 2)
        throw Error(ErrorCode::InvalidArgument, "differencing needs N >= 2");
    const double h = 1.0 / n;
    std::vector<double> d(f.size());
    d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    for (int k = 1; k < n; ++k)
        d[k] = (f[k + 1] - f[k - 1]) / (2.0 * h);
    d[n] = (3.0 * f[n] - 4.0 * f[n - 1] + f[n - 2]) / (2.0 * h);
    return d;
}

namespace {

bool blown(const State& y, const std::vector<std::size_t>& watch, double threshold)
{
    for (auto j : watch)
        if (!std::isfinite(y[j]) || std::abs(y[j]) > threshold)
            return true;
    return false;
}

} // namespace

BackwardResult rk4_backward(const Rhs& rhs, const State& terminal, int n, const BackwardOptions& opts)
{
    if (n < 2)
        throw Error(ErrorCode::InvalidArgument, "integration grid needs N >= 2");
    const std::size_t dim = terminal.size();
    BackwardResult res;
    res.states.assign(static_cast<std::size_t>(n) + 1, State{});
    res.states[n] = terminal;

    State y = terminal;
    State k1(dim), k2(dim), k3(dim), k4(dim), tmp(dim);
    const double q = 3.0 / (1.0 - opts.tail_exponent);

    // Derivative with respect to the integration variable x; x is t (stepping
    // with negative h) in the regular case and s in the singular case.
    auto deriv = [&](double x, const State& state, State& out) {
        if (!opts.singular) {
            rhs(Instant::at(x), state, out);
            return;
        }
        if (x <= 0.0) {
            std::fill(out.begin(), out.end(), 0.0);
            return;
        }
        const double rem = std::pow(x, q);
        rhs(Instant::before_close(rem), state, out);
        const double jac = -q * std::pow(x, q - 1.0);
        for (auto& v : out)
            v *= jac;
    };

    auto step = [&](double x, double h) {
        deriv(x, y, k1);
        for (std::size_t j = 0; j < dim; ++j) tmp[j] = y[j] + 0.5 * h * k1[j];
        deriv(x + 0.5 * h, tmp, k2);
        for (std::size_t j = 0; j < dim; ++j) tmp[j] = y[j] + 0.5 * h * k2[j];
        deriv(x + 0.5 * h, tmp, k3);
        for (std::size_t j = 0; j < dim; ++j) tmp[j] = y[j] + h * k3[j];
        deriv(x + h, tmp, k4);
        for (std::size_t j = 0; j < dim; ++j)
            y[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
    };

    for (int k = n - 1; k >= 0; --k) {
        const double t_hi = static_cast<double>(k + 1) / n;
        const bool in_tail = opts.singular && t_hi > 1.0 - opts.tail_fraction;
        const int sub = in_tail ? opts.tail_substeps : 1;
        double x0, x1;
        if (opts.singular) {
            x0 = std::pow(static_cast<double>(n - k - 1) / n, 1.0 / q);
            x1 = std::pow(static_cast<double>(n - k) / n, 1.0 / q);
        } else {
            x0 = t_hi;
            x1 = static_cast<double>(k) / n;
        }
        const double h = (x1 - x0) / sub;
        for (int s = 0; s < sub; ++s)
            step(x0 + s * h, h);
        if (!opts.watch.empty() && blown(y, opts.watch, opts.divergence_threshold)) {
            res.diverged = true;
            res.divergence_time = static_cast<double>(k) / n;
            return res;
        }
        res.states[k] = y;
    }
    return res;
}

std::vector<double> column(const BackwardResult& r, std::size_t j)
{
    std::vector<double> c(r.states.size());
    for (std::size_t k = 0; k < r.states.size(); ++k)
        c[k] = r.states[k].empty() ? std::nan("") : r.states[k][j];
    return c;
}

} // namespace twap::quad
