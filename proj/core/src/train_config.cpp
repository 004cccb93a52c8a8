// Copyright 2026 The CDNet Authors
// SPDX-License-Identifier: Apache-2.0

#include "cdnet/train_config.hpp"

#include <cmath>
#include <variant>

#include "cdnet/error.hpp"
#include "field_table.hpp"
#include "json.hpp"

namespace cdnet {

namespace {

using Field = detail::Field<TrainConfig>;

const std::vector<Field>& fields() {
    static const std::vector<Field> table = {
        {"epochs_pretrain", &TrainConfig::epochs_pretrain},
        {"epochs_finetune", &TrainConfig::epochs_finetune},
        {"epochs_chain", &TrainConfig::epochs_chain},
        {"batch_size", &TrainConfig::batch_size},
        {"chain_batch_size", &TrainConfig::chain_batch_size},
        {"learning_rate", &TrainConfig::learning_rate},
        {"chain_learning_rate", &TrainConfig::chain_learning_rate},
        {"seed", &TrainConfig::seed},
        {"margin", &TrainConfig::margin},
        {"temperature", &TrainConfig::temperature},
        {"epsilon_snn", &TrainConfig::epsilon_snn},
        {"embedding_size", &TrainConfig::embedding_size},
        {"steps", &TrainConfig::steps},
        {"beta_min", &TrainConfig::beta_min},
        {"beta_max", &TrainConfig::beta_max},
        {"noise_std", &TrainConfig::noise_std},
    };
    return table;
}

}  // namespace

void TrainConfig::validate() const {
    auto positive = [](std::size_t v, const char* name) {
        if (v == 0) throw ConfigError(std::string(name) + " must be positive");
    };
    positive(epochs_pretrain, "epochs_pretrain");
    positive(epochs_finetune, "epochs_finetune");
    positive(epochs_chain, "epochs_chain");
    positive(batch_size, "batch_size");
    positive(chain_batch_size, "chain_batch_size");
    positive(embedding_size, "embedding_size");
    positive(steps, "steps");
    if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
        throw ConfigError("learning_rate must be non-negative");
    }
    if (!(chain_learning_rate > 0.0)) throw ConfigError("chain_learning_rate must be positive");
    if (!(margin >= 0.0)) throw ConfigError("margin must be non-negative");
    if (!(temperature > 0.0)) throw ConfigError("temperature must be positive");
    if (!(epsilon_snn > 0.0)) throw ConfigError("epsilon_snn must be positive");
    if (!(noise_std >= 0.0)) throw ConfigError("noise_std must be non-negative");
    if (!(beta_min > 0.0 && beta_min <= beta_max && beta_max < 1.0)) {
        throw ConfigError("need 0 < beta_min <= beta_max < 1");
    }
}

NoiseSchedule TrainConfig::schedule() const { return linear_schedule(steps, beta_min, beta_max); }

ChainTrainConfig TrainConfig::chain_config() const {
    ChainTrainConfig c;
    c.epochs = epochs_chain;
    c.batch_size = chain_batch_size;
    c.learning_rate = chain_learning_rate;
    c.noise_std = noise_std;
    return c;
}

std::string to_json(const TrainConfig& config) {
    return detail::fields_to_json(config, fields()).dump(2);
}

TrainConfig train_config_from_json(const std::string& text, TrainConfig base) {
    detail::fields_from_json(base, fields(), nlohmann::json::parse(text));
    return base;
}

bool set_train_field(TrainConfig& config, const std::string& key, const std::string& value) {
    return detail::set_field(config, fields(), key, value);
}

std::vector<std::string> train_field_names() { return detail::field_names(fields()); }

}  // namespace cdnet
