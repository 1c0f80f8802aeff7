#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>

namespace rahl {

/// Deterministic random stream with a fully specified algorithm so that runs
/// are reproducible bit-for-bit and other implementations can match the
/// stream ("rahl-rng/1"):
///
///   engine     std::mt19937_64 seeded directly with the 64-bit seed (the
///              raw 64-bit output stream is specified by the C++ standard)
///   uniform01  (engine() >> 11) * 2^-53, a double in [0, 1)
///   normal     Box-Muller: sqrt(-2 ln(1-u1)) * cos(2*pi*u2), consuming
///              exactly two uniform01 draws per variate (the sine partner
///              is discarded)
///   index(n)   floor(uniform01() * n), one draw
///   shuffle    Fisher-Yates from the back using index(i+1)
///
/// Standard-library distributions are avoided on purpose: their algorithms
/// are implementation-defined and would not reproduce across toolchains.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform double in [0, 1), 53 random bits.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Standard normal variate (Box-Muller, fixed two-draw consumption).
    double normal() {
        const double u1 = uniform01();
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log1p(-u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    /// Uniform index in [0, n). n must be >= 1.
    std::size_t index(std::size_t n) {
        return static_cast<std::size_t>(uniform01() * static_cast<double>(n));
    }

    /// In-place Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::span<T> items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            std::size_t j = index(i);
            std::swap(items[i - 1], items[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

/// FNV-1a over raw bytes; used for parameter-trajectory fingerprints.
inline std::uint64_t fnv1a(const void* data, std::size_t bytes,
                           std::uint64_t h = 0xcbf29ce484222325ull) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < bytes; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

}  // namespace rahl
