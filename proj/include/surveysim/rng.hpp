#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>
#include <vector>

namespace surveysim {

// Deterministic, platform-independent randomness. Everything downstream of a
// seed must reproduce bit-identically across runs and thread schedules, so we
// avoid std::shuffle / std::normal_distribution (their draw sequences are
// implementation-defined) and keep the generators self-contained.

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

inline std::uint64_t splitmix64_mix(std::uint64_t z) {
    z += kGolden;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

class SplitMix64 {
public:
    using result_type = std::uint64_t;

    explicit SplitMix64(std::uint64_t seed = 0) : state_(seed) {}

    std::uint64_t operator()() {
        state_ += kGolden;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    static constexpr std::uint64_t min() { return 0; }
    static constexpr std::uint64_t max() { return ~0ULL; }

    // Unbiased integer in [0, n) by rejection.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = ~0ULL - ~0ULL % n;
        std::uint64_t x = (*this)();
        while (x >= limit) x = (*this)();
        return x % n;
    }

    // Uniform in (0, 1].
    double unit() { return (static_cast<double>((*this)() >> 11) + 1.0) * 0x1.0p-53; }

    // Standard normal via Box-Muller.
    double normal() {
        const double u1 = unit();
        const double u2 = unit();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
    }

private:
    std::uint64_t state_;
};

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Counter-based seed derivation: independent streams per (root, tag, index).
inline std::uint64_t derive_seed(std::uint64_t root, std::string_view tag, std::uint64_t index = 0) {
    return splitmix64_mix(splitmix64_mix(root ^ fnv1a64(tag)) ^ index * kGolden);
}

template <typename T>
void deterministic_shuffle(std::vector<T>& values, SplitMix64& rng) {
    for (std::size_t i = values.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng.below(i));
        using std::swap;
        swap(values[i - 1], values[j]);
    }
}

} // namespace surveysim
