#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <limits>

namespace gittins_exp {

inline constexpr std::uint64_t splitmix64_mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Folds a sequence of keys into one 64-bit seed. Different key sequences give
/// statistically independent streams; the same sequence always gives the same seed.
inline constexpr std::uint64_t derive_seed(std::initializer_list<std::uint64_t> keys) noexcept {
    std::uint64_t h = 0x6a09e667f3bcc909ULL;
    for (std::uint64_t k : keys) {
        h = splitmix64_mix(h ^ splitmix64_mix(k + 0x9e3779b97f4a7c15ULL));
    }
    return h;
}

/// SplitMix64 generator. One 64-bit word per call, cheap to construct, so each
/// simulated replication can own its streams outright.
class Rng {
public:
    using result_type = std::uint64_t;

    explicit constexpr Rng(std::uint64_t seed) noexcept : state_(seed) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    constexpr result_type operator()() noexcept {
        state_ += 0x9e3779b97f4a7c15ULL;
        return splitmix64_mix(state_);
    }

    /// Uniform on (0, 1], 53-bit resolution.
    double uniform_open0() noexcept {
        return static_cast<double>(((*this)() >> 11) + 1) * 0x1.0p-53;
    }

    /// Uniform index in [0, bound) from exactly one draw (multiply-shift).
    std::size_t uniform_index(std::size_t bound) noexcept {
        const unsigned __int128 prod = static_cast<unsigned __int128>((*this)()) * bound;
        return static_cast<std::size_t>(prod >> 64);
    }

private:
    std::uint64_t state_;
};

}  // namespace gittins_exp
