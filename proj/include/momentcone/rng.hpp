#pragma once

#include <cstdint>

namespace momentcone {

// Counter-based generator: output k of stream (seed, index) is a SplitMix64
// finalizer applied to key(seed, index) + k * golden gamma, so every
// (seed, index) pair gets its own stream independent of evaluation order.
class Stream {
public:
    Stream(std::uint64_t seed, std::uint64_t index);

    std::uint64_t next();
    // Uniform on (0, 1), never exactly 0 or 1.
    double uniform();
    double exponential();
    double normal();
    // Marsaglia-Tsang for shape >= 1, boosted for shape < 1.
    double gamma(double shape);
    // Inversion for small means, split into halves for large ones.
    std::uint64_t poisson(double mean);

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

std::uint64_t mix64(std::uint64_t z);

}  // namespace momentcone
