#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace rahl {

/// Bias-corrected Adam over a flat parameter vector. The tracked parameter
/// set may be split across several memory regions (network weights plus the
/// scalar loss parameter beta), so one step consumes a list of segments whose
/// sizes must add up to the state's size.
struct AdamState {
    std::size_t step = 0;
    std::vector<double> m;
    std::vector<double> v;
    double lr = 0.01;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;

    std::size_t size() const { return m.size(); }
};

AdamState adam_init(std::size_t n_params, double lr);

struct ParamSegment {
    double* params = nullptr;
    const double* grads = nullptr;
    std::size_t n = 0;
};

/// Maps a flat parameter index to a human-readable name for divergence
/// reports.
using ParamNamer = std::function<std::string(std::size_t)>;

/// One Adam update across the segments (which must cover exactly
/// state.size() parameters, in order). Throws TrainingDiverged on a
/// non-finite gradient, naming the parameter via `namer` when provided.
void adam_step(AdamState& state, std::span<const ParamSegment> segments,
               const ParamNamer& namer = nullptr);

/// Single-segment convenience overload.
void adam_step(AdamState& state, std::span<double> params,
               std::span<const double> grads, const ParamNamer& namer = nullptr);

}  // namespace rahl
