// Copyright 2026 The CDNet Authors
// SPDX-License-Identifier: Apache-2.0

#include "cdnet/losses.hpp"

#include <cmath>
#include <string>

#include "cdnet/error.hpp"

namespace cdnet {

Tensor triplet_loss(Tape& tape, const Tensor& anchor, std::span<const Tensor> positives,
                    std::span<const Tensor> negatives, double margin) {
    if (positives.size() != negatives.size() || positives.empty()) {
        throw ShapeError("triplet_loss: need equally many positives and negatives (got " +
                         std::to_string(positives.size()) + " and " +
                         std::to_string(negatives.size()) + ")");
    }
    std::vector<Tensor> hinges;
    hinges.reserve(positives.size());
    for (std::size_t t = 0; t < positives.size(); ++t) {
        Tensor gap = sub(tape, squared_distance(tape, anchor, positives[t]),
                         squared_distance(tape, anchor, negatives[t]));
        hinges.push_back(relu(tape, add_scalar(tape, gap, margin)));
    }
    return add_n(tape, hinges);
}

Tensor snn_loss(Tape& tape, std::span<const Tensor> embeddings,
                std::span<const Tensor> positive_embeddings, double temperature, double epsilon) {
    const std::size_t n = embeddings.size();
    if (n < 2) {
        throw ShapeError("snn_loss needs at least two embeddings");
    }
    if (positive_embeddings.size() != n) {
        throw ShapeError("snn_loss: " + std::to_string(n) + " embeddings but " +
                         std::to_string(positive_embeddings.size()) + " positives");
    }
    if (!(temperature > 0.0) || !(epsilon > 0.0)) {
        throw ConfigError("snn_loss: temperature and epsilon must be positive");
    }
    const double inv_tau = 1.0 / temperature;
    const Tensor eps = Tensor::scalar(epsilon);
    std::vector<Tensor> terms;
    terms.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        Tensor numerator = exp(tape, scale(tape, dot(tape, embeddings[i], positive_embeddings[i]), inv_tau));
        std::vector<Tensor> others;
        others.reserve(n - 1);
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            others.push_back(exp(tape, scale(tape, dot(tape, embeddings[i], embeddings[j]), inv_tau)));
        }
        Tensor denominator = add_scalar(tape, add_n(tape, others), epsilon);
        Tensor ratio = add_scalar(tape, div(tape, numerator, denominator), epsilon);
        terms.push_back(log(tape, ratio));
    }
    return scale(tape, add_n(tape, terms), -1.0 / static_cast<double>(n));
}

std::vector<std::vector<int>> snn_mask(std::size_t n) {
    std::vector<std::vector<int>> mask(n, std::vector<int>(n, 1));
    for (std::size_t i = 0; i < n; ++i) mask[i][i] = 0;
    return mask;
}

Tensor ce_loss(Tape& tape, std::span<const Tensor> probabilities, std::span<const int> labels) {
    if (probabilities.size() != labels.size()) {
        throw ShapeError("ce_loss: " + std::to_string(probabilities.size()) +
                         " predictions but " + std::to_string(labels.size()) + " labels");
    }
    std::vector<Tensor> selected;
    selected.reserve(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= probabilities[i].size()) {
            throw ShapeError("ce_loss: label " + std::to_string(labels[i]) + " out of range");
        }
        selected.push_back(select(tape, probabilities[i], static_cast<std::size_t>(labels[i])));
    }
    return ce_loss(tape, selected);
}

Tensor ce_loss(Tape& tape, std::span<const Tensor> true_class_probabilities) {
    if (true_class_probabilities.empty()) {
        throw ShapeError("ce_loss on an empty batch");
    }
    std::vector<Tensor> logs;
    logs.reserve(true_class_probabilities.size());
    for (const auto& p : true_class_probabilities) {
        logs.push_back(log(tape, p, kProbabilityFloor));
    }
    return scale(tape, add_n(tape, logs), -1.0 / static_cast<double>(logs.size()));
}

std::array<double, 3> UncertaintyWeights::sigmas() const {
    return {std::exp(log_sigma_ce.item()), std::exp(log_sigma_snn.item()),
            std::exp(log_sigma_triplet.item())};
}

std::vector<Tensor> UncertaintyWeights::parameters() const {
    return {log_sigma_ce, log_sigma_snn, log_sigma_triplet};
}

UncertaintyWeights UncertaintyWeights::clone() const {
    return {log_sigma_ce.clone(), log_sigma_snn.clone(), log_sigma_triplet.clone()};
}

namespace {

// L / (2 sigma^2) + log sigma with sigma = exp(s).
Tensor weighted_term(Tape& tape, const Tensor& loss, const Tensor& log_sigma) {
    Tensor precision = exp(tape, scale(tape, log_sigma, -2.0));
    return add(tape, scale(tape, mul(tape, loss, precision), 0.5), log_sigma);
}

}  // namespace

Tensor composite_loss(Tape& tape, const Tensor& l_ce, const Tensor& l_snn, const Tensor& l_triplet,
                      const UncertaintyWeights& weights) {
    const std::array<Tensor, 3> terms = {weighted_term(tape, l_ce, weights.log_sigma_ce),
                                         weighted_term(tape, l_snn, weights.log_sigma_snn),
                                         weighted_term(tape, l_triplet, weights.log_sigma_triplet)};
    return add_n(tape, terms);
}

double composite_value(double l_ce, double l_snn, double l_triplet,
                       const std::array<double, 3>& sigmas) {
    const std::array<double, 3> losses = {l_ce, l_snn, l_triplet};
    double total = 0.0;
    for (std::size_t k = 0; k < 3; ++k) {
        total += losses[k] / (2.0 * sigmas[k] * sigmas[k]) + std::log(sigmas[k]);
    }
    return total;
}

}  // namespace cdnet
