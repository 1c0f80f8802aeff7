#pragma once

#include <cstdint>
#include <filesystem>

#include "rahl/data.hpp"

namespace rahl {

/// Synthetic CQI-like trace: an AR(1) level process with Gaussian noise and
/// occasional isolated impulses, clamped to the CQI range [0, 15] and rounded
/// to integers.
struct SynthConfig {
    std::size_t length = 4000;
    std::uint64_t seed = 0;
    double base_level = 8.0;
    double smoothness = 0.9;        // AR(1) coefficient, in (0, 1)
    double noise_sd = 0.5;
    double outlier_rate = 0.0;      // per-step impulse probability, in [0, 1)
    double outlier_magnitude = 6.0;

    void validate() const;
};

/// Deterministic per seed. The latent level follows
///   x[0] = base_level
///   x[t] = smoothness * x[t-1] + (1 - smoothness) * base_level + N(0, noise_sd)
/// and the emitted value is round(clamp(x[t] + impulse, 0, 15)), where the
/// impulse is +-outlier_magnitude with probability outlier_rate (sign
/// equiprobable) and does not feed back into the level. Every step after the
/// first consumes a fixed number of random draws, so two configs differing
/// only in outlier_rate share the same latent path for the same seed.
TimeSeries generate(const SynthConfig& cfg);

/// Writes "t,CQI" rows; values are printed as integers.
void write_csv(const TimeSeries& series, const std::filesystem::path& path);

}  // namespace rahl
