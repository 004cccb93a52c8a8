// Copyright 2026 The CDNet Authors
// SPDX-License-Identifier: Apache-2.0

// Versioned JSON checkpoints. A checkpoint echoes the training configuration
// and may carry a classifier, the uncertainty weights and the four reverse
// chains. Doubles are written in shortest round-trip form, so a reloaded
// model reproduces predictions bit for bit.
//
//   {
//     "format": "cdnet-checkpoint", "version": 1, "stage": "...",
//     "config": { flat TrainConfig },
//     "classifier": { "architecture", "input_length", "embedding_size",
//                     "body_frozen", "parameters": [ {name, shape, values} ] },
//     "uncertainty": { "log_sigma_ce", "log_sigma_snn", "log_sigma_triplet" },
//     "chains": { "length", "steps", "channels", "kernel",
//                 "chains": [ { "kind", "denoisers": [ { "step", "parameters" } ] } ] }
//   }

#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "cdnet/classifier.hpp"
#include "cdnet/losses.hpp"
#include "cdnet/reverse_chain.hpp"
#include "cdnet/train_config.hpp"

namespace cdnet {

inline constexpr int kCheckpointVersion = 1;
inline constexpr const char* kCheckpointFormat = "cdnet-checkpoint";

struct Checkpoint {
    std::string stage;
    TrainConfig config;
    std::unique_ptr<BaseClassifier> classifier;
    std::optional<UncertaintyWeights> weights;
    std::optional<ReverseChains> chains;
};

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace cdnet
