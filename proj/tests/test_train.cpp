#include <cmath>
#include <vector>

#include <doctest.h>

#include "rahl/errors.hpp"
#include "rahl/rng.hpp"
#include "rahl/train.hpp"

using namespace rahl;

namespace {

TrainConfig small_config(LossSpec loss, std::size_t epochs = 5) {
    TrainConfig cfg;
    cfg.epochs = epochs;
    cfg.batch_size = 8;
    cfg.window = 6;
    cfg.lr = 0.01;
    cfg.seed = 1;
    cfg.loss = loss;
    cfg.hidden_size = 8;
    cfg.fc_hidden = 8;
    return cfg;
}

WindowedDataset wavy_dataset(std::size_t len, std::size_t w, std::uint64_t seed) {
    RngStream rng(seed);
    std::vector<double> series(len);
    for (std::size_t i = 0; i < len; ++i) {
        series[i] = 0.5 + 0.4 * std::sin(static_cast<double>(i) * 0.3) +
                    0.05 * (rng.uniform01() - 0.5);
    }
    return make_windows(series, w);
}

}  // namespace

TEST_CASE("training is bitwise deterministic") {
    const auto data = wavy_dataset(60, 6, 2);
    const TrainConfig cfg = small_config(LossSpec::rahl(0.5));

    const TrainRecord a = train(cfg, data);
    const TrainRecord b = train(cfg, data);

    CHECK(a.params == b.params);
    CHECK(a.epoch_loss == b.epoch_loss);
    CHECK(a.param_fingerprint == b.param_fingerprint);
    CHECK(a.delta_per_epoch == b.delta_per_epoch);
    CHECK(a.final_loss.beta == b.final_loss.beta);
}

TEST_CASE("the recorded fingerprints end at the returned parameters") {
    const auto data = wavy_dataset(60, 6, 3);
    const TrainRecord rec = train(small_config(LossSpec::mse(), 3), data);
    CHECK(rec.epoch_loss.size() == 3);
    CHECK(rec.param_fingerprint.size() == 3);
    CHECK(rec.param_fingerprint.back() == rec.params.fingerprint());
    CHECK(rec.delta_per_epoch.empty());
    CHECK(rec.wall_seconds >= 0.0);
}

TEST_CASE("a frozen-beta Rahl run walks the same weights as fixed Huber") {
    const auto data = wavy_dataset(80, 6, 4);

    TrainConfig rahl_cfg = small_config(LossSpec::rahl(0.75), 8);
    rahl_cfg.freeze_beta = true;
    TrainConfig huber_cfg = rahl_cfg;
    huber_cfg.loss = LossSpec::huber(0.75);
    huber_cfg.freeze_beta = false;

    const TrainRecord r = train(rahl_cfg, data);
    const TrainRecord h = train(huber_cfg, data);

    CHECK(r.param_fingerprint == h.param_fingerprint);
    CHECK(r.params == h.params);
    CHECK(r.epoch_loss == h.epoch_loss);
    CHECK(r.final_loss.beta == 0.0);
    for (double d : r.delta_per_epoch) CHECK(d == 0.75);
}

TEST_CASE("single-sample training is one Adam step per epoch") {
    // With one window there is no shuffling and no batch averaging left, so
    // the whole loop collapses to forward / loss_grad / backward / adam_step,
    // which we can replay bitwise through the public pieces.
    const auto data = wavy_dataset(7, 6, 5);
    REQUIRE(data.size() == 1);

    TrainConfig cfg = small_config(LossSpec::rahl(0.4), 4);
    cfg.batch_size = 1;
    const TrainRecord rec = train(cfg, data);

    LstmParams params = init_params(cfg.model_config());
    LossSpec spec = cfg.loss;
    AdamState adam = adam_init(params.size() + 1, cfg.lr);
    for (int epoch = 0; epoch < 4; ++epoch) {
        auto [pred, trace] = forward(params, data.input(0));
        const LossGrad g = loss_grad(spec, data.target(0), pred);
        const LstmGrads grads = backward(params, trace, g.d_pred);
        const double d_beta = *g.d_beta;
        const ParamSegment segs[2] = {
            {params.flat().data(), grads.flat().data(), params.size()},
            {&spec.beta, &d_beta, 1},
        };
        adam_step(adam, segs);
    }

    CHECK(rec.params == params);
    CHECK(rec.final_loss.beta == spec.beta);
    CHECK(rec.adam.step == 4);
}

TEST_CASE("loss falls on a learnable series") {
    const auto data = wavy_dataset(120, 6, 6);
    TrainConfig cfg = small_config(LossSpec::mse(), 60);
    cfg.batch_size = 16;

    const TrainRecord rec = train(cfg, data);
    CHECK(rec.epoch_loss.back() < rec.epoch_loss.front());
    CHECK(rec.epoch_loss.back() < 0.1 * rec.epoch_loss.front());
    for (double l : rec.epoch_loss) CHECK(std::isfinite(l));
}

TEST_CASE("unfrozen Rahl adapts its breakpoint downward") {
    const auto data = wavy_dataset(100, 6, 7);
    TrainConfig cfg = small_config(LossSpec::rahl(0.3), 30);

    const TrainRecord rec = train(cfg, data);
    REQUIRE(rec.delta_per_epoch.size() == 30);
    for (double d : rec.delta_per_epoch) {
        CHECK(d > 0.0);
        CHECK(d <= 0.3);  // the beta gradient is nonnegative
    }
    CHECK(rec.final_loss.beta < 0.0);
    CHECK(rec.delta_per_epoch.back() < 0.3);
}

TEST_CASE("config validation rejects impossible settings") {
    const auto data = wavy_dataset(40, 6, 8);

    TrainConfig cfg = small_config(LossSpec::mse());
    cfg.epochs = 0;
    CHECK_THROWS_AS(train(cfg, data), InvalidArgument);

    cfg = small_config(LossSpec::mse());
    cfg.batch_size = 0;
    CHECK_THROWS_AS(train(cfg, data), InvalidArgument);

    cfg = small_config(LossSpec::mse());
    cfg.batch_size = data.size() + 1;
    CHECK_THROWS_AS(train(cfg, data), InvalidArgument);

    cfg = small_config(LossSpec::mse());
    cfg.lr = 0.0;
    CHECK_THROWS_AS(train(cfg, data), InvalidArgument);

    cfg = small_config(LossSpec::huber(-1.0));
    CHECK_THROWS_AS(train(cfg, data), InvalidArgument);

    cfg = small_config(LossSpec::mse());
    cfg.window = 5;  // dataset was built with w=6
    CHECK_THROWS_AS(train(cfg, data), InvalidArgument);
}

TEST_CASE("divergence reports where it happened") {
    const auto data = wavy_dataset(20, 6, 9);
    TrainConfig cfg = small_config(LossSpec::mse(), 5);
    cfg.batch_size = data.size();  // one batch per epoch
    cfg.lr = 1e300;

    bool thrown = false;
    try {
        train(cfg, data);
    } catch (const TrainingDiverged& e) {
        thrown = true;
        CHECK(e.epoch() == 1);
        CHECK(e.batch() == 0);
    }
    CHECK(thrown);
}

TEST_CASE("predict_series maps windows back to original units") {
    const auto data = wavy_dataset(30, 6, 10);
    ModelConfig mc{1, 8, 8, 3};
    const LstmParams params = init_params(mc);
    const Scaler sc{2.0, 12.0};

    const auto [preds, targets] = predict_series(params, sc, data);
    REQUIRE(preds.size() == data.size());
    REQUIRE(targets.size() == data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        CHECK(preds[i] == sc.unscale1(predict(params, data.input(i))));
        CHECK(targets[i] == sc.unscale1(data.target(i)));
    }

    const Scaler degenerate{5.0, 5.0};
    CHECK_THROWS_AS(predict_series(params, degenerate, data), DataError);
}
