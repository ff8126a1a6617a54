#pragma once

#include <cstdint>

namespace hft {

// SplitMix64 (Steele, Lea, Flood 2014). Fixed algorithm so that seeded
// constructions are reproducible bit-for-bit across runs and platforms.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    std::uint64_t next() noexcept {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1), 53-bit resolution
    double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // uniform in [-1, 1)
    double symmetric() noexcept { return 2.0 * uniform() - 1.0; }

private:
    std::uint64_t state_;
};

} // namespace hft
