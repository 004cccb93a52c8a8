// Copyright 2026 The CDNet Authors
// SPDX-License-Identifier: Apache-2.0

// Pretraining objectives and their uncertainty-weighted combination
//
//   total = sum_k L_k / (2 sigma_k^2) + sum_k log sigma_k
//
// with sigma_k = exp(s_k) and the s_k learned alongside the network.

#pragma once

#include <array>
#include <span>
#include <vector>

#include "cdnet/tensor.hpp"

namespace cdnet {

/// sum_t max(0, |a - p_t|^2 - |a - n_t|^2 + margin).
Tensor triplet_loss(Tape& tape, const Tensor& anchor, std::span<const Tensor> positives,
                    std::span<const Tensor> negatives, double margin);

/// Soft nearest neighbour loss over N anchor embeddings E_i and their positive
/// embeddings P_i:
///
///   -1/N sum_i log( exp(E_i.P_i / tau) / (sum_{j != i} exp(E_i.E_j / tau) + eps) + eps )
///
/// The denominator runs over the other anchors only. Embeddings are used as
/// given; callers normalize them first if they want bounded exponents.
Tensor snn_loss(Tape& tape, std::span<const Tensor> embeddings,
                std::span<const Tensor> positive_embeddings, double temperature, double epsilon);

/// mask(i, j) of the SNN denominator: 0 on the diagonal, 1 elsewhere.
std::vector<std::vector<int>> snn_mask(std::size_t n);

inline constexpr double kProbabilityFloor = 1e-12;

/// Mean negative log of the probability assigned to each sample's true class.
/// `probabilities[i]` holds one probability per class.
Tensor ce_loss(Tape& tape, std::span<const Tensor> probabilities, std::span<const int> labels);
/// Same loss when the true-class probabilities are already selected.
Tensor ce_loss(Tape& tape, std::span<const Tensor> true_class_probabilities);

struct UncertaintyWeights {
    Tensor log_sigma_ce = Tensor::scalar(0.0, true);
    Tensor log_sigma_snn = Tensor::scalar(0.0, true);
    Tensor log_sigma_triplet = Tensor::scalar(0.0, true);

    std::array<double, 3> sigmas() const;
    std::vector<Tensor> parameters() const;
    UncertaintyWeights clone() const;
};

Tensor composite_loss(Tape& tape, const Tensor& l_ce, const Tensor& l_snn, const Tensor& l_triplet,
                      const UncertaintyWeights& weights);

/// Plain evaluation of the composite formula for given sigmas.
double composite_value(double l_ce, double l_snn, double l_triplet,
                       const std::array<double, 3>& sigmas);

struct LossReport {
    std::size_t epoch = 0;
    double l_ce = 0.0;
    double l_snn = 0.0;
    double l_triplet = 0.0;
    double l_total = 0.0;
    std::array<double, 3> sigmas{1.0, 1.0, 1.0};
};

}  // namespace cdnet
