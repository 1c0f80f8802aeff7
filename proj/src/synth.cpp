#include "rahl/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "rahl/errors.hpp"
#include "rahl/rng.hpp"

namespace rahl {

void SynthConfig::validate() const {
    if (length < 1) throw InvalidArgument("synth: length must be >= 1");
    if (!(base_level >= 0.0 && base_level <= 15.0)) {
        throw InvalidArgument("synth: base level must be in [0, 15]");
    }
    if (!(smoothness > 0.0 && smoothness < 1.0)) {
        throw InvalidArgument("synth: smoothness must be in (0, 1)");
    }
    if (!(noise_sd >= 0.0) || !std::isfinite(noise_sd)) {
        throw InvalidArgument("synth: noise sd must be >= 0");
    }
    if (!(outlier_rate >= 0.0 && outlier_rate < 1.0)) {
        throw InvalidArgument("synth: outlier rate must be in [0, 1)");
    }
    if (!(outlier_magnitude > 0.0) || !std::isfinite(outlier_magnitude)) {
        throw InvalidArgument("synth: outlier magnitude must be > 0");
    }
}

TimeSeries generate(const SynthConfig& cfg) {
    cfg.validate();
    RngStream rng(cfg.seed);

    TimeSeries series;
    series.name = "CQI";
    series.origin = "synthetic";
    series.values.reserve(cfg.length);

    auto emit = [&](double latent, double impulse) {
        const double v = std::clamp(latent + impulse, 0.0, 15.0);
        series.values.push_back(std::round(v));
    };

    double x = cfg.base_level;
    emit(x, 0.0);
    for (std::size_t t = 1; t < cfg.length; ++t) {
        // Fixed draw order per step: noise (two uniforms), impulse test,
        // impulse sign. The sign is drawn even when unused so the stream
        // stays aligned across outlier rates.
        const double noise = rng.normal() * cfg.noise_sd;
        const bool hit = rng.uniform01() < cfg.outlier_rate;
        const bool negative = rng.uniform01() < 0.5;
        x = cfg.smoothness * x + (1.0 - cfg.smoothness) * cfg.base_level + noise;
        const double impulse = hit ? (negative ? -cfg.outlier_magnitude : cfg.outlier_magnitude) : 0.0;
        emit(x, impulse);
    }
    return series;
}

void write_csv(const TimeSeries& series, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw DataError(DataErrorKind::FileNotFound, "cannot write " + path.string());
    }
    out << "t," << (series.name.empty() ? "CQI" : series.name) << "\n";
    for (std::size_t t = 0; t < series.values.size(); ++t) {
        out << t << "," << static_cast<long long>(std::llround(series.values[t])) << "\n";
    }
    if (!out) {
        throw DataError(DataErrorKind::BadFormat, "write failed: " + path.string());
    }
}

}  // namespace rahl
