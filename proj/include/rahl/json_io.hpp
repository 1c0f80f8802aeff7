#pragma once

#include <nlohmann/json.hpp>

#include "rahl/losses.hpp"
#include "rahl/train.hpp"

namespace rahl {

/// JSON round-trips for the config types, shared by the checkpoint header,
/// the run manifest, and the CLI. Doubles survive exactly (shortest
/// round-trip serialization).

inline nlohmann::ordered_json loss_to_json(const LossSpec& spec) {
    nlohmann::ordered_json j;
    j["kind"] = loss_kind_name(spec.kind);
    if (spec.kind == LossKind::Huber) j["delta"] = spec.delta;
    if (spec.kind == LossKind::Rahl) {
        j["alpha"] = spec.alpha;
        j["beta"] = spec.beta;
    }
    return j;
}

inline LossSpec loss_from_json(const nlohmann::json& j) {
    LossSpec spec;
    spec.kind = loss_kind_from_name(j.at("kind").get<std::string>());
    if (spec.kind == LossKind::Huber) spec.delta = j.at("delta").get<double>();
    if (spec.kind == LossKind::Rahl) {
        spec.alpha = j.at("alpha").get<double>();
        spec.beta = j.at("beta").get<double>();
    }
    spec.validate();
    return spec;
}

inline nlohmann::ordered_json train_config_to_json(const TrainConfig& cfg) {
    nlohmann::ordered_json j;
    j["epochs"] = cfg.epochs;
    j["batch_size"] = cfg.batch_size;
    j["window"] = cfg.window;
    j["lr"] = cfg.lr;
    j["seed"] = cfg.seed;
    j["train_fraction"] = cfg.train_fraction;
    j["freeze_beta"] = cfg.freeze_beta;
    j["hidden_size"] = cfg.hidden_size;
    j["fc_hidden"] = cfg.fc_hidden;
    j["loss"] = loss_to_json(cfg.loss);
    return j;
}

inline TrainConfig train_config_from_json(const nlohmann::json& j) {
    TrainConfig cfg;
    cfg.epochs = j.at("epochs").get<std::size_t>();
    cfg.batch_size = j.at("batch_size").get<std::size_t>();
    cfg.window = j.at("window").get<std::size_t>();
    cfg.lr = j.at("lr").get<double>();
    cfg.seed = j.at("seed").get<std::uint64_t>();
    cfg.train_fraction = j.at("train_fraction").get<double>();
    cfg.freeze_beta = j.at("freeze_beta").get<bool>();
    cfg.hidden_size = j.at("hidden_size").get<std::size_t>();
    cfg.fc_hidden = j.at("fc_hidden").get<std::size_t>();
    cfg.loss = loss_from_json(j.at("loss"));
    cfg.validate();
    return cfg;
}

}  // namespace rahl
