// Copyright 2026 The CDNet Authors
// SPDX-License-Identifier: Apache-2.0

// Learned reverse process. A chain holds one small residual CNN per diffusion
// step, each trained to map x^t back to x^{t-1}. Binary problems use four
// chains (within class 0, within class 1, across 0->1, across 1->0) that share
// no parameters with each other or between steps.

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "cdnet/dataio.hpp"
#include "cdnet/diffusion.hpp"
#include "cdnet/optim.hpp"
#include "cdnet/random.hpp"
#include "cdnet/tensor.hpp"

namespace cdnet {

enum class ChainKind { Within0 = 0, Within1 = 1, Across01 = 2, Across10 = 3 };

inline constexpr std::array<ChainKind, 4> kAllChainKinds = {
    ChainKind::Within0, ChainKind::Within1, ChainKind::Across01, ChainKind::Across10};

/// Class of the series a trajectory starts from (its x^0).
int source_class(ChainKind kind);
/// Class of the partner the trajectory is pulled toward.
int partner_class(ChainKind kind);
ChainKind within_chain(int label);
ChainKind across_chain(int from_label, int to_label);
std::string to_string(ChainKind kind);
ChainKind chain_kind_from_string(const std::string& name);

struct DenoiserShape {
    std::size_t channels = 16;
    std::size_t kernel = 5;
    /// Start the output convolution at zero so an untrained denoiser is the
    /// identity map.
    bool zero_init_output = true;
};

/// conv(k, same) + relu -> conv(k, same) + relu -> conv(k, same) to one
/// channel, plus the input added back.
class StepDenoiser {
public:
    StepDenoiser(std::size_t step, std::size_t length, const DenoiserShape& shape, Rng& rng);

    std::size_t step() const { return step_; }
    std::size_t length() const { return length_; }
    const DenoiserShape& shape() const { return shape_; }

    Tensor forward(Tape& tape, const Tensor& state) const;
    std::vector<double> apply(std::span<const double> state) const;

    std::vector<Tensor> parameters() const;
    std::vector<std::pair<std::string, Tensor>> named_parameters() const;
    /// Deep copy with its own parameter storage.
    StepDenoiser clone() const;

private:
    std::size_t step_;
    std::size_t length_;
    DenoiserShape shape_;
    Tensor w1_, b1_, w2_, b2_, w3_, b3_;
};

struct ReverseChain {
    ChainKind kind = ChainKind::Within0;
    /// denoisers[t - 1] serves step t.
    std::vector<StepDenoiser> denoisers;

    std::size_t steps() const { return denoisers.size(); }
    ReverseChain clone() const;
};

struct ChainTrainConfig {
    std::size_t epochs = 200;
    std::size_t batch_size = 16;
    double learning_rate = 1e-3;
    double noise_std = 0.25;
    DenoiserShape shape{};
    /// Size of the fixed validation batch tracked during training.
    std::size_t validation_size = 32;
    /// Validation MSE is recorded every this many epochs (and at both ends).
    std::size_t validation_every = 20;

    void validate() const;
};

struct ChainTrainingHistory {
    std::vector<std::size_t> epochs;
    /// validation_mse[k][t - 1] is the validation MSE of step t at epochs[k].
    std::vector<std::vector<double>> validation_mse;
};

ReverseChain train_reverse_chain(std::span<const LabeledSeries> data, ChainKind kind,
                                 const NoiseSchedule& schedule, const ChainTrainConfig& config,
                                 Rng& rng, ChainTrainingHistory* history = nullptr);

/// Applies denoisers t, t-1, ..., 1 to `state`. `on_step`, when set, observes
/// every step index as it is applied.
std::vector<double> denoise_compose(const ReverseChain& chain, std::span<const double> state,
                                    std::size_t t,
                                    const std::function<void(std::size_t)>& on_step = {});

struct ReverseChains {
    std::array<ReverseChain, 4> chains;

    const ReverseChain& operator[](ChainKind kind) const {
        return chains[static_cast<std::size_t>(kind)];
    }
    ReverseChain& operator[](ChainKind kind) { return chains[static_cast<std::size_t>(kind)]; }
    std::size_t steps() const { return chains[0].steps(); }
};

/// Trains all four chains. Each chain draws from its own stream derived from
/// (seed, kind), so the result does not depend on `jobs`.
ReverseChains train_reverse_chains(std::span<const LabeledSeries> data,
                                   const NoiseSchedule& schedule, const ChainTrainConfig& config,
                                   std::uint64_t seed, std::size_t jobs = 1,
                                   std::array<ChainTrainingHistory, 4>* histories = nullptr);

struct StepDenoisingReport {
    double model_mse = 0.0;
    double identity_mse = 0.0;
};

/// Held-out check of each step: mean squared error of f^t(x^t) against
/// x^{t-1} next to the identity baseline, over `trajectories` fresh forward
/// trajectories drawn from `data` for the chain's kind.
std::vector<StepDenoisingReport> measure_denoising(const ReverseChain& chain,
                                                   std::span<const LabeledSeries> data,
                                                   const NoiseSchedule& schedule, double noise_std,
                                                   std::size_t trajectories, Rng& rng);

struct ContrastiveSet {
    LabeledSeries anchor;
    std::size_t anchor_index = 0;
    /// Dataset index of the same-class partner the positives come from.
    std::size_t positive_source = 0;
    /// Dataset index of the other-class partner the negatives come from.
    std::size_t negative_source = 0;
    /// positives[t - 1] = x^{t+}; negatives[t - 1] = x^{t-}.
    std::vector<std::vector<double>> positives;
    std::vector<std::vector<double>> negatives;
};

/// Positives: a same-class partner is diffused toward the anchor and the
/// within-class chain of the anchor's class is composed back from each state.
/// Negatives: an other-class partner is diffused toward the anchor and
/// composed back through the across chain running into the anchor's class.
ContrastiveSet generate_contrastive_set(std::span<const LabeledSeries> data,
                                        std::size_t anchor_index, const ReverseChains& chains,
                                        const NoiseSchedule& schedule, double noise_std, Rng& rng);

/// One contrastive set per series in `data`, each anchor using the stream
/// derived from (seed, anchor index).
std::vector<ContrastiveSet> generate_contrastive_sets(std::span<const LabeledSeries> data,
                                                      const ReverseChains& chains,
                                                      const NoiseSchedule& schedule,
                                                      double noise_std, std::uint64_t seed);

}  // namespace cdnet
