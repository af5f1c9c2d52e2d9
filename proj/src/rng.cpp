#include "twap/rng.hpp"

#include <cmath>

namespace twap {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

std::uint64_t mix64(std::uint64_t z)
{
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

} // namespace

StreamRng::StreamRng(std::uint64_t seed, std::uint64_t stream)
    : key_(mix64(mix64(seed + kGolden) ^ mix64(stream * kGolden + 0x632BE59BD9B4E019ull)))
{
}

StreamRng::result_type StreamRng::operator()()
{
    ++counter_;
    return mix64(key_ + counter_ * kGolden);
}

double StreamRng::uniform()
{
    // 53 random bits, shifted off zero
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
}

double StreamRng::normal()
{
    return normal_(*this);
}

double StreamRng::log_gamma_variate(double shape)
{
    using P = std::gamma_distribution<double>::param_type;
    if (shape >= 1.0)
        return std::log(gamma_(*this, P(shape, 1.0)));
    // Gamma(a) = Gamma(a + 1) U^(1/a)
    const double g = gamma_(*this, P(shape + 1.0, 1.0));
    return std::log(g) + std::log(uniform()) / shape;
}

double StreamRng::beta(double a, double b)
{
    const double lx = log_gamma_variate(a);
    const double ly = log_gamma_variate(b);
    return 1.0 / (1.0 + std::exp(ly - lx));
}

} // namespace twap
