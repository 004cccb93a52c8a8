// Copyright 2026 The CDNet Authors
// SPDX-License-Identifier: Apache-2.0

#include "cdnet/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

#include "cdnet/error.hpp"
#include "cdnet/optim.hpp"

namespace cdnet {

namespace {

constexpr std::uint64_t kInitSalt = 0x1417;
constexpr std::uint64_t kPretrainSalt = 0x9E7A;
constexpr std::uint64_t kFinetuneSalt = 0xF1E7;
constexpr std::uint64_t kSupervisedSalt = 0x5C0E;

Tensor as_tensor(std::span<const double> values) {
    return Tensor::vector(std::vector<double>(values.begin(), values.end()));
}

// Consecutive batches over a shuffled order. A trailing batch of one sample is
// folded into its predecessor so every batch has at least two anchors.
std::vector<std::vector<std::size_t>> make_batches(std::vector<std::size_t> order,
                                                   std::size_t batch_size) {
    std::vector<std::vector<std::size_t>> batches;
    for (std::size_t start = 0; start < order.size(); start += batch_size) {
        const std::size_t stop = std::min(order.size(), start + batch_size);
        batches.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(start),
                             order.begin() + static_cast<std::ptrdiff_t>(stop));
    }
    if (batches.size() > 1 && batches.back().size() == 1) {
        batches[batches.size() - 2].push_back(batches.back().front());
        batches.pop_back();
    }
    return batches;
}

std::vector<std::size_t> iota_indices(std::size_t n) {
    std::vector<std::size_t> out(n);
    std::iota(out.begin(), out.end(), std::size_t{0});
    return out;
}

void check_series_length(const BaseClassifier& classifier, std::size_t length, const char* what) {
    if (length != classifier.input_length()) {
        throw ShapeError(std::string(what) + ": series length " + std::to_string(length) +
                         " does not match classifier input length " +
                         std::to_string(classifier.input_length()));
    }
}

std::vector<Tensor> tensors_of(const std::vector<NamedParameter>& named) {
    std::vector<Tensor> out;
    for (const auto& p : named) out.push_back(p.tensor);
    return out;
}

// Cross-entropy training of `trainable` on precomputed or live features.
template <typename Forward>
void train_cross_entropy(std::vector<Tensor> trainable, std::span<const LabeledSeries> data,
                         double learning_rate, std::size_t batch_size, std::size_t epochs, Rng& rng,
                         Forward&& forward_logits) {
    if (data.empty()) {
        throw DataError("cannot train on an empty split");
    }
    if (!(learning_rate > 0.0)) {
        return;
    }
    Adam optimizer(std::move(trainable), AdamOptions{.learning_rate = learning_rate});
    auto order = iota_indices(data.size());
    for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        for (const auto& batch : make_batches(order, std::max<std::size_t>(batch_size, 1))) {
            Tape tape;
            std::vector<Tensor> probabilities;
            std::vector<int> labels;
            for (std::size_t idx : batch) {
                probabilities.push_back(softmax(tape, forward_logits(tape, idx)));
                labels.push_back(data[idx].label);
            }
            Tensor loss = ce_loss(tape, probabilities, labels);
            tape.backward(loss);
            optimizer.step();
        }
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// BaseClassifier

std::vector<NamedParameter> BaseClassifier::named_parameters() const {
    auto all = body_parameters();
    for (auto& p : head_parameters()) all.push_back(std::move(p));
    return all;
}

std::vector<Tensor> BaseClassifier::parameters() const { return tensors_of(named_parameters()); }

void BaseClassifier::freeze_body() {
    for (auto& p : body_parameters()) p.tensor.set_requires_grad(false);
}

void BaseClassifier::unfreeze_body() {
    for (auto& p : body_parameters()) p.tensor.set_requires_grad(true);
}

bool BaseClassifier::body_frozen() const {
    const auto flags = frozen_flags();
    return std::all_of(flags.begin(), flags.end(), [](bool f) { return f; });
}

std::vector<bool> BaseClassifier::frozen_flags() const {
    std::vector<bool> flags;
    for (const auto& p : body_parameters()) flags.push_back(!p.tensor.requires_grad());
    return flags;
}

// ---------------------------------------------------------------------------
// SmallCnn

SmallCnn::SmallCnn(std::size_t length, std::size_t embedding_size, Rng& rng)
    : length_(length), embedding_size_(embedding_size) {
    if (length < kMinSeriesLength) {
        throw ConfigError("small CNN needs series of length >= " + std::to_string(kMinSeriesLength) +
                          ", got " + std::to_string(length));
    }
    if (embedding_size == 0) {
        throw ConfigError("embedding size must be positive");
    }
    conv1_w_ = Tensor::zeros({16, 1, 7}, true);
    conv1_b_ = Tensor::zeros({16}, true);
    conv2_w_ = Tensor::zeros({32, 16, 5}, true);
    conv2_b_ = Tensor::zeros({32}, true);
    embed_w_ = Tensor::zeros({embedding_size, 32}, true);
    embed_b_ = Tensor::zeros({embedding_size}, true);
    head_w_ = Tensor::zeros({2, embedding_size}, true);
    head_b_ = Tensor::zeros({2}, true);
    init_uniform_fan_in(conv1_w_, 7, rng);
    init_uniform_fan_in(conv2_w_, 16 * 5, rng);
    init_uniform_fan_in(embed_w_, 32, rng);
    init_uniform_fan_in(head_w_, embedding_size, rng);
}

Tensor SmallCnn::embed(Tape& tape, const Tensor& series) const {
    if (series.size() != length_) {
        throw ShapeError("small CNN expects length " + std::to_string(length_) + ", got " +
                         shape_string(series.shape()));
    }
    Tensor x = reshape(tape, series, {1, length_});
    Tensor h = relu(tape, conv1d(tape, x, conv1_w_, conv1_b_, Padding::Same));
    h = relu(tape, conv1d(tape, h, conv2_w_, conv2_b_, Padding::Same));
    return relu(tape, dense(tape, global_average_pool(tape, h), embed_w_, embed_b_));
}

Tensor SmallCnn::head(Tape& tape, const Tensor& embedding) const {
    return dense(tape, embedding, head_w_, head_b_);
}

std::vector<NamedParameter> SmallCnn::body_parameters() const {
    return {{"body.conv1.weight", conv1_w_}, {"body.conv1.bias", conv1_b_},
            {"body.conv2.weight", conv2_w_}, {"body.conv2.bias", conv2_b_},
            {"body.embed.weight", embed_w_}, {"body.embed.bias", embed_b_}};
}

std::vector<NamedParameter> SmallCnn::head_parameters() const {
    return {{"head.weight", head_w_}, {"head.bias", head_b_}};
}

std::unique_ptr<BaseClassifier> SmallCnn::clone() const {
    auto copy = std::make_unique<SmallCnn>(*this);
    copy->conv1_w_ = conv1_w_.clone();
    copy->conv1_b_ = conv1_b_.clone();
    copy->conv2_w_ = conv2_w_.clone();
    copy->conv2_b_ = conv2_b_.clone();
    copy->embed_w_ = embed_w_.clone();
    copy->embed_b_ = embed_b_.clone();
    copy->head_w_ = head_w_.clone();
    copy->head_b_ = head_b_.clone();
    return copy;
}

std::unique_ptr<BaseClassifier> build_small_cnn(std::size_t length, std::size_t embedding_size,
                                                std::uint64_t seed) {
    Rng rng = derive_rng(seed, 0, kInitSalt);
    return std::make_unique<SmallCnn>(length, embedding_size, rng);
}

// ---------------------------------------------------------------------------
// Prediction

Prediction prediction_from_logits(double logit0, double logit1) {
    const double peak = std::max(logit0, logit1);
    const double e0 = std::exp(logit0 - peak);
    const double e1 = std::exp(logit1 - peak);
    Prediction p;
    p.probabilities = {e0 / (e0 + e1), e1 / (e0 + e1)};
    p.label = logit1 > logit0 ? 1 : 0;
    return p;
}

Prediction predict(const BaseClassifier& classifier, std::span<const double> series) {
    check_series_length(classifier, series.size(), "predict");
    Tape tape(GradMode::Disabled);
    const Tensor logits = classifier.logits(tape, as_tensor(series));
    return prediction_from_logits(logits.values()[0], logits.values()[1]);
}

// ---------------------------------------------------------------------------
// Training

PretrainResult pretrain(BaseClassifier& classifier, std::span<const ContrastiveSet> sets,
                        UncertaintyWeights& weights, const TrainConfig& config) {
    config.validate();
    if (sets.size() < 2) {
        throw DataError("pretraining needs at least two contrastive sets");
    }
    if (config.batch_size > sets.size()) {
        throw ConfigError("batch_size " + std::to_string(config.batch_size) +
                          " exceeds the number of contrastive sets (" +
                          std::to_string(sets.size()) + ")");
    }
    const std::size_t steps = sets.front().positives.size();
    for (const auto& set : sets) {
        check_series_length(classifier, set.anchor.length(), "pretrain");
        if (set.positives.size() != steps || set.negatives.size() != steps || steps == 0) {
            throw ShapeError("pretrain: contrastive sets disagree on the number of states");
        }
        for (const auto* group : {&set.positives, &set.negatives}) {
            for (const auto& s : *group) check_series_length(classifier, s.size(), "pretrain");
        }
    }

    std::vector<Tensor> trainable = classifier.parameters();
    for (auto& p : weights.parameters()) trainable.push_back(p);
    std::optional<Adam> optimizer;
    if (config.learning_rate > 0.0) {
        optimizer.emplace(trainable, AdamOptions{.learning_rate = config.learning_rate});
    }

    Rng rng = derive_rng(config.seed, 0, kPretrainSalt);
    auto order = iota_indices(sets.size());
    PretrainResult result;
    for (std::size_t epoch = 1; epoch <= config.epochs_pretrain; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double sum_ce = 0.0, sum_snn = 0.0, sum_triplet = 0.0;
        const auto batches = make_batches(order, config.batch_size);
        for (const auto& batch : batches) {
            Tape tape;
            std::vector<Tensor> probabilities, triplets, anchors_unit, positives_unit;
            std::vector<int> labels;
            for (std::size_t idx : batch) {
                const auto& set = sets[idx];
                Tensor anchor = classifier.embed(tape, as_tensor(set.anchor.values));
                probabilities.push_back(softmax(tape, classifier.head(tape, anchor)));
                labels.push_back(set.anchor.label);
                std::vector<Tensor> pos, neg;
                for (std::size_t t = 0; t < steps; ++t) {
                    pos.push_back(classifier.embed(tape, as_tensor(set.positives[t])));
                    neg.push_back(classifier.embed(tape, as_tensor(set.negatives[t])));
                }
                triplets.push_back(triplet_loss(tape, anchor, pos, neg, config.margin));
                anchors_unit.push_back(l2_normalize(tape, anchor));
                positives_unit.push_back(l2_normalize(tape, pos.front()));
            }
            Tensor l_ce = ce_loss(tape, probabilities, labels);
            Tensor l_snn = snn_loss(tape, anchors_unit, positives_unit, config.temperature,
                                    config.epsilon_snn);
            Tensor l_triplet =
                scale(tape, add_n(tape, triplets), 1.0 / static_cast<double>(batch.size()));
            Tensor total = composite_loss(tape, l_ce, l_snn, l_triplet, weights);
            sum_ce += l_ce.item();
            sum_snn += l_snn.item();
            sum_triplet += l_triplet.item();
            if (optimizer) {
                tape.backward(total);
                optimizer->step();
            }
        }
        const double n = static_cast<double>(batches.size());
        LossReport report;
        report.epoch = epoch;
        report.l_ce = sum_ce / n;
        report.l_snn = sum_snn / n;
        report.l_triplet = sum_triplet / n;
        report.sigmas = weights.sigmas();
        report.l_total = composite_value(report.l_ce, report.l_snn, report.l_triplet, report.sigmas);
        result.log.push_back(report);
    }
    return result;
}

void finetune(BaseClassifier& classifier, std::span<const LabeledSeries> data,
              const TrainConfig& config) {
    config.validate();
    for (const auto& s : data) check_series_length(classifier, s.length(), "finetune");
    classifier.freeze_body();
    // The body is frozen, so every embedding can be computed once up front.
    std::vector<Tensor> embeddings;
    embeddings.reserve(data.size());
    for (const auto& s : data) {
        Tape tape(GradMode::Disabled);
        embeddings.push_back(classifier.embed(tape, as_tensor(s.values)).detach());
    }
    Rng rng = derive_rng(config.seed, 0, kFinetuneSalt);
    train_cross_entropy(tensors_of(classifier.head_parameters()), data, config.learning_rate,
                        config.batch_size, config.epochs_finetune, rng,
                        [&](Tape& tape, std::size_t idx) {
                            return classifier.head(tape, embeddings[idx]);
                        });
}

void train_supervised(BaseClassifier& classifier, std::span<const LabeledSeries> data,
                      const TrainConfig& config, std::size_t epochs) {
    config.validate();
    for (const auto& s : data) check_series_length(classifier, s.length(), "train_supervised");
    Rng rng = derive_rng(config.seed, 0, kSupervisedSalt);
    train_cross_entropy(classifier.parameters(), data, config.learning_rate, config.batch_size,
                        epochs, rng, [&](Tape& tape, std::size_t idx) {
                            return classifier.logits(tape, as_tensor(data[idx].values));
                        });
}

}  // namespace cdnet
