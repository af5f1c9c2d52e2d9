#pragma once

#include <cstdint>
#include <random>

namespace twap {

/// Counter-based generator: output j of stream (seed, id) is a pure function
/// of (seed, id, j).
class StreamRng {
public:
    using result_type = std::uint64_t;

    StreamRng(std::uint64_t seed, std::uint64_t stream);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~result_type{0}; }
    result_type operator()();

    /// Uniform on (0,1).
    double uniform();
    double normal();
    /// log of a Gamma(shape, 1) variate, accurate for tiny shapes.
    double log_gamma_variate(double shape);
    double beta(double a, double b);

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    std::normal_distribution<double> normal_;
    std::gamma_distribution<double> gamma_;
};

} // namespace twap
