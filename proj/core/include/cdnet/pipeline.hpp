// Copyright 2026 The CDNet Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "cdnet/classifier.hpp"
#include "cdnet/dataio.hpp"
#include "cdnet/losses.hpp"
#include "cdnet/reverse_chain.hpp"
#include "cdnet/train_config.hpp"

namespace cdnet {

struct CdnetModel {
    TrainConfig config;
    std::unique_ptr<BaseClassifier> classifier;
    UncertaintyWeights weights;
    ReverseChains chains;
    std::vector<LossReport> pretrain_log;
};

/// Trains the four reverse chains for `config.seed`. `histories`, when set,
/// receives the validation curves in chain-kind order.
ReverseChains train_chains_stage(std::span<const LabeledSeries> train, const TrainConfig& config,
                                 std::size_t jobs = 1,
                                 std::array<ChainTrainingHistory, 4>* histories = nullptr);

/// Generates contrastive sets from trained chains and pretrains a fresh small
/// CNN on them. Leaves the body unfrozen.
CdnetModel pretrain_stage(std::span<const LabeledSeries> train, const TrainConfig& config,
                          ReverseChains chains);

/// Full pipeline: chains, contrastive sets, pretraining, head fine-tuning.
CdnetModel train_cdnet(std::span<const LabeledSeries> train, const TrainConfig& config,
                       std::size_t jobs = 1);

/// The same small CNN trained with cross-entropy only, for
/// epochs_pretrain + epochs_finetune epochs.
std::unique_ptr<BaseClassifier> train_baseline(std::span<const LabeledSeries> train,
                                               const TrainConfig& config);

}  // namespace cdnet
