// Copyright 2026 The CDNet Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "cdnet/dataio.hpp"
#include "cdnet/losses.hpp"
#include "cdnet/random.hpp"
#include "cdnet/reverse_chain.hpp"
#include "cdnet/tensor.hpp"
#include "cdnet/train_config.hpp"

namespace cdnet {

struct NamedParameter {
    std::string name;
    Tensor tensor;
};

/// A binary classifier split into a feature extractor ("body") producing an
/// embedding and a final layer ("head") producing two logits. Pretraining
/// shapes the embedding; fine-tuning freezes the body and retrains the head.
class BaseClassifier {
public:
    virtual ~BaseClassifier() = default;

    virtual std::string architecture() const = 0;
    virtual std::size_t input_length() const = 0;
    virtual std::size_t embedding_size() const = 0;

    virtual Tensor embed(Tape& tape, const Tensor& series) const = 0;
    virtual Tensor head(Tape& tape, const Tensor& embedding) const = 0;
    Tensor logits(Tape& tape, const Tensor& series) const { return head(tape, embed(tape, series)); }

    virtual std::vector<NamedParameter> body_parameters() const = 0;
    virtual std::vector<NamedParameter> head_parameters() const = 0;
    std::vector<NamedParameter> named_parameters() const;
    std::vector<Tensor> parameters() const;

    virtual std::unique_ptr<BaseClassifier> clone() const = 0;

    /// Frozen body parameters stop requiring gradients, so no optimizer step
    /// can touch them.
    void freeze_body();
    void unfreeze_body();
    bool body_frozen() const;
    /// One flag per body parameter, true when frozen.
    std::vector<bool> frozen_flags() const;
};

/// conv(16, k7, same) + relu -> conv(32, k5, same) + relu -> global average
/// pool -> dense(d) + relu as the body; dense(2) as the head.
class SmallCnn final : public BaseClassifier {
public:
    SmallCnn(std::size_t length, std::size_t embedding_size, Rng& rng);

    std::string architecture() const override { return "small_cnn"; }
    std::size_t input_length() const override { return length_; }
    std::size_t embedding_size() const override { return embedding_size_; }

    Tensor embed(Tape& tape, const Tensor& series) const override;
    Tensor head(Tape& tape, const Tensor& embedding) const override;

    std::vector<NamedParameter> body_parameters() const override;
    std::vector<NamedParameter> head_parameters() const override;
    std::unique_ptr<BaseClassifier> clone() const override;

private:
    std::size_t length_;
    std::size_t embedding_size_;
    Tensor conv1_w_, conv1_b_, conv2_w_, conv2_b_, embed_w_, embed_b_, head_w_, head_b_;
};

std::unique_ptr<BaseClassifier> build_small_cnn(std::size_t length, std::size_t embedding_size,
                                                std::uint64_t seed);

struct Prediction {
    int label = 0;
    std::array<double, 2> probabilities{0.5, 0.5};
};

/// Softmax over two logits; equal logits resolve to label 0.
Prediction prediction_from_logits(double logit0, double logit1);
Prediction predict(const BaseClassifier& classifier, std::span<const double> series);

struct PretrainResult {
    /// One report per epoch.
    std::vector<LossReport> log;
};

/// Trains body, head and the uncertainty weights on contrastive sets with the
/// composite of cross-entropy (anchors), SNN (anchors vs their state-1
/// positives) and triplet (anchor vs every positive/negative state) losses in
/// embedding space. A zero learning rate evaluates and logs without updating.
PretrainResult pretrain(BaseClassifier& classifier, std::span<const ContrastiveSet> sets,
                        UncertaintyWeights& weights, const TrainConfig& config);

/// Freezes the body and retrains only the head with cross-entropy.
void finetune(BaseClassifier& classifier, std::span<const LabeledSeries> data,
              const TrainConfig& config);

/// Plain cross-entropy training of every parameter for `epochs` epochs; the
/// baseline arm of a comparison.
void train_supervised(BaseClassifier& classifier, std::span<const LabeledSeries> data,
                      const TrainConfig& config, std::size_t epochs);

}  // namespace cdnet
