#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace rahl {

struct ModelConfig {
    std::size_t input_size = 1;
    std::size_t hidden_size = 64;
    std::size_t fc_hidden = 64;
    std::uint64_t seed = 0;

    void validate() const;
    bool same_shape(const ModelConfig& other) const {
        return input_size == other.input_size && hidden_size == other.hidden_size &&
               fc_hidden == other.fc_hidden;
    }
};

enum class Gate { Input = 0, Forget = 1, Candidate = 2, Output = 3 };

/// All learnable parameters of the network in one contiguous buffer:
/// per-gate input weights W [hidden x input], recurrent weights U
/// [hidden x hidden] and biases b [hidden] (gate order: input, forget,
/// candidate, output), then the fully-connected layer [fc_hidden x hidden]
/// with bias, then the scalar linear head. Row-major throughout.
///
/// Gradients use the same container, so parameter updates are plain
/// elementwise walks over flat().
class LstmParams {
public:
    LstmParams() = default;
    explicit LstmParams(const ModelConfig& cfg);

    const ModelConfig& config() const { return cfg_; }
    std::size_t size() const { return data_.size(); }

    std::span<double> flat() { return data_; }
    std::span<const double> flat() const { return data_; }

    std::span<double> w(Gate g);
    std::span<const double> w(Gate g) const;
    std::span<double> u(Gate g);
    std::span<const double> u(Gate g) const;
    std::span<double> b(Gate g);
    std::span<const double> b(Gate g) const;

    std::span<double> fc_weight();
    std::span<const double> fc_weight() const;
    std::span<double> fc_bias();
    std::span<const double> fc_bias() const;
    std::span<double> out_weight();
    std::span<const double> out_weight() const;
    double& out_bias();
    double out_bias() const;

    void fill(double v);

    /// Human-readable name of the parameter at a flat() index, e.g.
    /// "u_forget[130]"; used in divergence reports.
    std::string name_at(std::size_t flat_index) const;

    /// FNV-1a fingerprint of the raw parameter bytes.
    std::uint64_t fingerprint() const;

    bool operator==(const LstmParams& other) const {
        return cfg_.same_shape(other.cfg_) && data_ == other.data_;
    }

private:
    std::size_t w_off(Gate g) const;
    std::size_t u_off(Gate g) const;
    std::size_t b_off(Gate g) const;

    ModelConfig cfg_;
    std::vector<double> data_;
};

using LstmGrads = LstmParams;

/// Everything the backward pass needs from a forward evaluation: inputs,
/// per-timestep gate activations, cell and hidden states, and the head
/// activations.
struct ForwardTrace {
    std::size_t steps = 0;
    ModelConfig cfg;

    std::vector<double> x;                            // [steps x input]
    std::vector<double> gate_i, gate_f, gate_g, gate_o;  // [steps x hidden]
    std::vector<double> cell, cell_tanh, hidden;         // [steps x hidden]
    std::vector<double> fc_pre, fc_post;                 // [fc_hidden]
    double prediction = 0.0;

    void resize(std::size_t steps, const ModelConfig& cfg);
};

/// Seeded initialization: every weight uniform in [-k, k] with
/// k = 1/sqrt(hidden_size), forget-gate bias 1, all other biases 0.
LstmParams init_params(const ModelConfig& cfg);

/// Runs the LSTM recurrence over a window (zero initial states), then the
/// ReLU fully-connected layer and the scalar linear head. Returns the
/// prediction and fills `trace` for a later backward pass.
double forward(const LstmParams& params, std::span<const double> window,
               ForwardTrace& trace);

/// Convenience overload allocating its own trace.
std::pair<double, ForwardTrace> forward(const LstmParams& params,
                                        std::span<const double> window);

/// Prediction only.
double predict(const LstmParams& params, std::span<const double> window);

/// Reusable workspace for backward(); avoids per-sample allocation in the
/// training loop.
struct BackwardScratch {
    std::vector<double> dh, dh_prev, dc, da_i, da_f, da_g, da_o, d_fc_pre;
};

/// Backpropagation through time. Adds the gradient of
/// d_prediction * prediction with respect to every parameter into `grads`
/// (which must have the same shape as `params`).
void backward_accumulate(const LstmParams& params, const ForwardTrace& trace,
                         double d_prediction, LstmGrads& grads,
                         BackwardScratch& scratch);

/// Fresh-gradient convenience wrapper around backward_accumulate.
LstmGrads backward(const LstmParams& params, const ForwardTrace& trace,
                   double d_prediction);

}  // namespace rahl
