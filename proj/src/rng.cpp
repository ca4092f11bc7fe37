#include "momentcone/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace momentcone {

namespace {
constexpr std::uint64_t golden_gamma = 0x9e3779b97f4a7c15ULL;
}

std::uint64_t mix64(std::uint64_t z)
{
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

Stream::Stream(std::uint64_t seed, std::uint64_t index)
    : key_(mix64(mix64(seed + golden_gamma) ^ (index * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL)))
{
}

std::uint64_t Stream::next()
{
    ++counter_;
    return mix64(key_ + counter_ * golden_gamma);
}

double Stream::uniform()
{
    // 53 random bits centred in their cell.
    return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
}

double Stream::exponential()
{
    return -std::log(uniform());
}

double Stream::normal()
{
    double u = uniform(), v = uniform();
    return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * std::numbers::pi * v);
}

double Stream::gamma(double shape)
{
    if (!(shape > 0.0)) throw std::invalid_argument("gamma shape must be > 0");
    if (shape < 1.0) return gamma(shape + 1.0) * std::pow(uniform(), 1.0 / shape);
    const double d = shape - 1.0 / 3.0, c = 1.0 / std::sqrt(9.0 * d);
    while (true) {
        double x = normal(), v = 1.0 + c * x;
        if (v <= 0.0) continue;
        v = v * v * v;
        double u = uniform();
        if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) return d * v;
    }
}

std::uint64_t Stream::poisson(double mean)
{
    if (!(mean >= 0.0) || !std::isfinite(mean)) throw std::invalid_argument("Poisson mean must be finite and >= 0");
    if (mean > 30.0) return poisson(mean / 2.0) + poisson(mean / 2.0);
    double u = uniform();
    double p = std::exp(-mean), cdf = p;
    std::uint64_t k = 0;
    while (u > cdf && p > 0.0) {
        ++k;
        p *= mean / static_cast<double>(k);
        cdf += p;
    }
    return k;
}

}  // namespace momentcone
