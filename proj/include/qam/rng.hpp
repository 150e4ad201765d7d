#pragma once

#include <cstdint>
#include <numbers>

namespace qam {

// Fixed, portable generators so every experiment reproduces bit for bit
// across platforms and across reimplementations in other languages.
// SplitMix64 (Steele/Lea/Vigna) seeds Xoshiro256** 1.0 (Blackman/Vigna);
// both are public-domain reference algorithms. Reference output vectors
// are frozen in tests/test_rng.cpp.

/// SplitMix64: 64-bit state, one output per step.
class SplitMix64 {
public:
    explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    constexpr std::uint64_t next() noexcept {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t state_;
};

/// SplitMix64 finalizer as a standalone bijective mixer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Derives an independent sub-stream seed from a master seed and up to
/// three indices (experiment cell, trial, probe). Each value is folded in
/// through one SplitMix64 increment-and-mix step, in argument order.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                                    std::uint64_t b = 0, std::uint64_t c = 0) noexcept {
    std::uint64_t h = master;
    h = mix64(h + 0x9E3779B97F4A7C15ULL + a);
    h = mix64(h + 0x9E3779B97F4A7C15ULL + b);
    h = mix64(h + 0x9E3779B97F4A7C15ULL + c);
    return h;
}

/// Xoshiro256** 1.0. State initialized from the seed via four SplitMix64
/// outputs, per the reference seeding recipe.
class Xoshiro256StarStar {
public:
    explicit constexpr Xoshiro256StarStar(std::uint64_t seed) noexcept {
        SplitMix64 sm(seed);
        for (auto& word : s_) word = sm.next();
    }

    constexpr std::uint64_t next() noexcept {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1): top 53 bits scaled by 2^-53.
    constexpr double next_unit() noexcept {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    /// Uniform phase in [0, 2*pi).
    double next_phase() noexcept { return next_unit() * (2.0 * std::numbers::pi); }

    /// Uniform double in [-half_width, +half_width).
    double next_symmetric(double half_width) noexcept {
        return (2.0 * next_unit() - 1.0) * half_width;
    }

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t s_[4]{};
};

} // namespace qam
