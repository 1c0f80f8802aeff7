#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "rahl/data.hpp"
#include "rahl/losses.hpp"
#include "rahl/model.hpp"
#include "rahl/optim.hpp"

namespace rahl {

struct TrainConfig {
    std::size_t epochs = 300;
    std::size_t batch_size = 24;
    std::size_t window = 36;
    double lr = 0.01;
    std::uint64_t seed = 0;
    LossSpec loss = LossSpec::rahl(1.0);
    double train_fraction = 0.8;

    /// Excludes beta from the optimizer so a Rahl run degenerates to fixed
    /// Huber with delta = alpha. Ignored for the other losses.
    bool freeze_beta = false;

    std::size_t hidden_size = 64;
    std::size_t fc_hidden = 64;

    void validate() const;
    ModelConfig model_config() const {
        return ModelConfig{1, hidden_size, fc_hidden, seed};
    }
};

struct TrainRecord {
    std::vector<double> epoch_loss;              // mean training loss per epoch
    std::vector<double> delta_per_epoch;         // Rahl only, else empty
    std::vector<std::uint64_t> param_fingerprint;  // per-epoch parameter hash
    LstmParams params;
    LossSpec final_loss;  // carries the trained beta for Rahl
    AdamState adam;
    double wall_seconds = 0.0;
};

/// Mini-batch training. Batch order is a fresh seeded permutation each epoch;
/// the per-batch gradient is the mean over the batch of the loss gradient
/// chained through backpropagation; Adam updates the weights and, for
/// unfrozen Rahl, beta. Deterministic given (config, data).
TrainRecord train(const TrainConfig& cfg, const WindowedDataset& data);

/// One forward pass per window, with predictions and targets mapped back to
/// original units through the scaler.
std::pair<std::vector<double>, std::vector<double>> predict_series(
    const LstmParams& params, const Scaler& scaler, const WindowedDataset& data);

}  // namespace rahl
