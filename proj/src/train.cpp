#include "rahl/train.hpp"

#include <chrono>
#include <cmath>
#include <numeric>

#include "rahl/errors.hpp"
#include "rahl/rng.hpp"

namespace rahl {

namespace {

// Keeps the shuffle stream distinct from the init stream, which is seeded
// with cfg.seed directly.
constexpr std::uint64_t kShuffleSalt = 0x9e3779b97f4a7c15ull;

}  // namespace

void TrainConfig::validate() const {
    if (epochs < 1) throw InvalidArgument("train: epochs must be >= 1");
    if (batch_size < 1) throw InvalidArgument("train: batch size must be >= 1");
    if (window < 1) throw InvalidArgument("train: window must be >= 1");
    if (!std::isfinite(lr) || lr <= 0.0) throw InvalidArgument("train: lr must be positive");
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw InvalidArgument("train: train fraction must be in (0, 1)");
    }
    loss.validate();
    model_config().validate();
}

TrainRecord train(const TrainConfig& cfg, const WindowedDataset& data) {
    cfg.validate();
    const std::size_t n = data.size();
    if (n == 0) throw InvalidArgument("train: empty dataset");
    if (data.w != cfg.window) {
        throw InvalidArgument("train: dataset windows of length " + std::to_string(data.w) +
                              " do not match configured window " + std::to_string(cfg.window));
    }
    if (cfg.batch_size > n) {
        throw InvalidArgument("train: batch size " + std::to_string(cfg.batch_size) +
                              " exceeds sample count " + std::to_string(n));
    }

    const auto t_start = std::chrono::steady_clock::now();

    LstmParams params = init_params(cfg.model_config());
    LstmGrads grads(cfg.model_config());
    BackwardScratch scratch;
    ForwardTrace trace;

    LossSpec spec = cfg.loss;
    const bool train_beta = spec.kind == LossKind::Rahl && !cfg.freeze_beta;
    const std::size_t n_weights = params.size();
    AdamState adam = adam_init(n_weights + (train_beta ? 1 : 0), cfg.lr);

    const ParamNamer namer = [&](std::size_t k) {
        return k < n_weights ? params.name_at(k) : std::string("loss.beta");
    };

    RngStream shuffle_rng(cfg.seed ^ kShuffleSalt);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});

    TrainRecord rec;
    rec.epoch_loss.reserve(cfg.epochs);
    rec.param_fingerprint.reserve(cfg.epochs);
    if (spec.kind == LossKind::Rahl) rec.delta_per_epoch.reserve(cfg.epochs);

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        shuffle_rng.shuffle(std::span<std::size_t>(order));

        double epoch_loss_sum = 0.0;
        for (std::size_t start = 0, batch = 0; start < n; start += cfg.batch_size, ++batch) {
            const std::size_t bn = std::min(cfg.batch_size, n - start);
            const double inv_bn = 1.0 / static_cast<double>(bn);

            grads.fill(0.0);
            double batch_loss_sum = 0.0;
            double d_beta_sum = 0.0;
            for (std::size_t b = 0; b < bn; ++b) {
                const std::size_t idx = order[start + b];
                const double pred = forward(params, data.input(idx), trace);
                if (!std::isfinite(pred)) {
                    throw TrainingDiverged("non-finite prediction", epoch, batch);
                }
                const double y = data.target(idx);
                batch_loss_sum += loss_value(spec, y, pred);
                const LossGrad g = loss_grad(spec, y, pred);
                backward_accumulate(params, trace, g.d_pred * inv_bn, grads, scratch);
                if (g.d_beta) d_beta_sum += *g.d_beta;
            }
            if (!std::isfinite(batch_loss_sum)) {
                throw TrainingDiverged("non-finite batch loss", epoch, batch);
            }
            epoch_loss_sum += batch_loss_sum;

            try {
                if (train_beta) {
                    const double d_beta = d_beta_sum * inv_bn;
                    const ParamSegment segs[2] = {
                        {params.flat().data(), grads.flat().data(), n_weights},
                        {&spec.beta, &d_beta, 1},
                    };
                    adam_step(adam, segs, namer);
                } else {
                    adam_step(adam, params.flat(), grads.flat(), namer);
                }
            } catch (const TrainingDiverged& e) {
                throw TrainingDiverged(e.what(), epoch, batch, e.param());
            }
        }

        rec.epoch_loss.push_back(epoch_loss_sum / static_cast<double>(n));
        rec.param_fingerprint.push_back(params.fingerprint());
        if (spec.kind == LossKind::Rahl) {
            rec.delta_per_epoch.push_back(rahl_delta(spec.alpha, spec.beta));
        }
    }

    rec.params = std::move(params);
    rec.final_loss = spec;
    rec.adam = std::move(adam);
    rec.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return rec;
}

std::pair<std::vector<double>, std::vector<double>> predict_series(
    const LstmParams& params, const Scaler& scaler, const WindowedDataset& data) {
    if (!(scaler.max > scaler.min)) {
        throw DataError(DataErrorKind::DegenerateScale, "predict_series: degenerate scaler");
    }
    const std::size_t n = data.size();
    std::vector<double> preds(n), targets(n);
    ForwardTrace trace;
    for (std::size_t i = 0; i < n; ++i) {
        preds[i] = scaler.unscale1(forward(params, data.input(i), trace));
        targets[i] = scaler.unscale1(data.target(i));
    }
    return {std::move(preds), std::move(targets)};
}

}  // namespace rahl
