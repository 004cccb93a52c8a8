// Copyright 2026 The CDNet Authors
// SPDX-License-Identifier: Apache-2.0

#include "cdnet/pipeline.hpp"

#include "cdnet/error.hpp"

namespace cdnet {

namespace {

std::size_t common_length(std::span<const LabeledSeries> train) {
    if (train.empty()) {
        throw DataError("training split is empty");
    }
    const std::size_t m = train.front().length();
    for (const auto& s : train) {
        if (s.length() != m) throw ShapeError("training series differ in length");
    }
    return m;
}

}  // namespace

ReverseChains train_chains_stage(std::span<const LabeledSeries> train, const TrainConfig& config,
                                 std::size_t jobs,
                                 std::array<ChainTrainingHistory, 4>* histories) {
    config.validate();
    common_length(train);
    return train_reverse_chains(train, config.schedule(), config.chain_config(), config.seed, jobs,
                                histories);
}

CdnetModel pretrain_stage(std::span<const LabeledSeries> train, const TrainConfig& config,
                          ReverseChains chains) {
    config.validate();
    const std::size_t length = common_length(train);
    CdnetModel model;
    model.config = config;
    model.chains = std::move(chains);
    const auto sets =
        generate_contrastive_sets(train, model.chains, config.schedule(), config.noise_std, config.seed);
    model.classifier = build_small_cnn(length, config.embedding_size, config.seed);
    model.pretrain_log = pretrain(*model.classifier, sets, model.weights, config).log;
    return model;
}

CdnetModel train_cdnet(std::span<const LabeledSeries> train, const TrainConfig& config,
                       std::size_t jobs) {
    CdnetModel model = pretrain_stage(train, config, train_chains_stage(train, config, jobs));
    finetune(*model.classifier, train, config);
    return model;
}

std::unique_ptr<BaseClassifier> train_baseline(std::span<const LabeledSeries> train,
                                               const TrainConfig& config) {
    config.validate();
    auto classifier = build_small_cnn(common_length(train), config.embedding_size, config.seed);
    train_supervised(*classifier, train, config, config.epochs_pretrain + config.epochs_finetune);
    return classifier;
}

}  // namespace cdnet
