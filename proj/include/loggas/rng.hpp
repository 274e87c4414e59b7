#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace loggas {

// splitmix64 finalizer; used to derive independent sub-stream seeds from a base
// seed so that per-trial streams do not overlap for adjacent seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream, std::uint64_t index = 0) {
    return splitmix64(splitmix64(base ^ (0x517cc1b727220a95ULL * (stream + 1))) + index);
}

// Deterministic Gaussian source. Box-Muller over mt19937_64 uniforms: every
// normal consumes exactly two 64-bit draws, so the stream layout is fixed by
// the seed alone (no implementation-defined std::normal_distribution state).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    // uniform on (0, 1]
    double uniform() {
        const std::uint64_t r = gen_();
        return static_cast<double>((r >> 11) + 1) * 0x1.0p-53;
    }

    double normal() {
        const double u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    std::mt19937_64 gen_;
};

} // namespace loggas
