// Copyright 2026 The CDNet Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "cdnet/diffusion.hpp"
#include "cdnet/reverse_chain.hpp"

namespace cdnet {

struct TrainConfig {
    std::size_t epochs_pretrain = 100;
    std::size_t epochs_finetune = 50;
    std::size_t epochs_chain = 200;
    std::size_t batch_size = 16;
    std::size_t chain_batch_size = 16;
    double learning_rate = 1e-3;
    double chain_learning_rate = 1e-3;
    std::uint64_t seed = 0;
    double margin = 1.0;
    double temperature = 0.1;
    double epsilon_snn = 1e-8;
    std::size_t embedding_size = 32;
    std::size_t steps = 5;
    double beta_min = 0.05;
    double beta_max = 0.3;
    double noise_std = 0.25;

    /// Throws ConfigError naming the first offending field. A learning rate of
    /// exactly zero is accepted and means "log losses without updating".
    void validate() const;

    NoiseSchedule schedule() const;
    ChainTrainConfig chain_config() const;

    bool operator==(const TrainConfig&) const = default;
};

/// Flat JSON object with one key per field.
std::string to_json(const TrainConfig& config);
/// Reads known keys from a flat JSON object; other keys are ignored so one
/// file can carry both training and simulation settings.
TrainConfig train_config_from_json(const std::string& text, TrainConfig base = {});

/// Sets one field from its textual value; returns false for unknown keys.
bool set_train_field(TrainConfig& config, const std::string& key, const std::string& value);
std::vector<std::string> train_field_names();

}  // namespace cdnet
