// Copyright 2026 The CDNet Authors
// SPDX-License-Identifier: Apache-2.0

#include "cdnet/reverse_chain.hpp"

#include <algorithm>
#include <future>
#include <numeric>

#include "cdnet/error.hpp"

namespace cdnet {

namespace {

constexpr std::uint64_t kChainSalt = 0xC4A1;
constexpr std::uint64_t kContrastSalt = 0xC0A7;

// Draws a partner for `anchor` from `pool`, never the anchor itself.
std::size_t draw_partner(const std::vector<std::size_t>& pool, std::size_t anchor, Rng& rng) {
    if (pool.size() == 1 && pool[0] == anchor) {
        throw DataError("no partner available for anchor " + std::to_string(anchor));
    }
    while (true) {
        const std::size_t candidate = pool[uniform_index(pool.size(), rng)];
        if (candidate != anchor) {
            return candidate;
        }
    }
}

double mse(std::span<const double> a, std::span<const double> b) {
    double total = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        total += d * d;
    }
    return total / static_cast<double>(a.size());
}

struct ChainData {
    std::vector<std::size_t> anchors;
    std::vector<std::size_t> partners;
};

ChainData chain_data(std::span<const LabeledSeries> data, ChainKind kind) {
    ChainData out{indices_of_class(data, source_class(kind)),
                  indices_of_class(data, partner_class(kind))};
    for (int label : {source_class(kind), partner_class(kind)}) {
        const auto count = indices_of_class(data, label).size();
        if (count < 2) {
            throw DataError("chain " + to_string(kind) + " needs at least 2 series of class " +
                            std::to_string(label) + ", found " + std::to_string(count));
        }
    }
    return out;
}

}  // namespace

int source_class(ChainKind kind) {
    switch (kind) {
        case ChainKind::Within0:
        case ChainKind::Across01:
            return 0;
        case ChainKind::Within1:
        case ChainKind::Across10:
            return 1;
    }
    return 0;
}

int partner_class(ChainKind kind) {
    switch (kind) {
        case ChainKind::Within0:
        case ChainKind::Across10:
            return 0;
        case ChainKind::Within1:
        case ChainKind::Across01:
            return 1;
    }
    return 0;
}

ChainKind within_chain(int label) { return label == 0 ? ChainKind::Within0 : ChainKind::Within1; }

ChainKind across_chain(int from_label, int to_label) {
    if (from_label == to_label) {
        throw ConfigError("across chain needs two different classes");
    }
    return from_label == 0 ? ChainKind::Across01 : ChainKind::Across10;
}

std::string to_string(ChainKind kind) {
    switch (kind) {
        case ChainKind::Within0:
            return "within0";
        case ChainKind::Within1:
            return "within1";
        case ChainKind::Across01:
            return "across01";
        case ChainKind::Across10:
            return "across10";
    }
    return "unknown";
}

ChainKind chain_kind_from_string(const std::string& name) {
    for (auto kind : kAllChainKinds) {
        if (to_string(kind) == name) return kind;
    }
    throw DataError("unknown chain kind '" + name + "'");
}

// ---------------------------------------------------------------------------
// StepDenoiser

StepDenoiser::StepDenoiser(std::size_t step, std::size_t length, const DenoiserShape& shape,
                           Rng& rng)
    : step_(step), length_(length), shape_(shape) {
    if (shape.channels == 0 || shape.kernel == 0 || shape.kernel > length) {
        throw ConfigError("denoiser kernel must be in 1..length and channels positive");
    }
    const std::size_t c = shape.channels;
    const std::size_t k = shape.kernel;
    w1_ = Tensor::zeros({c, 1, k}, true);
    b1_ = Tensor::zeros({c}, true);
    w2_ = Tensor::zeros({c, c, k}, true);
    b2_ = Tensor::zeros({c}, true);
    w3_ = Tensor::zeros({1, c, k}, true);
    b3_ = Tensor::zeros({1}, true);
    init_uniform_fan_in(w1_, k, rng);
    init_uniform_fan_in(w2_, c * k, rng);
    if (!shape.zero_init_output) {
        init_uniform_fan_in(w3_, c * k, rng);
    }
}

Tensor StepDenoiser::forward(Tape& tape, const Tensor& state) const {
    if (state.size() != length_) {
        throw ShapeError("denoiser for length " + std::to_string(length_) + " got input " +
                         shape_string(state.shape()));
    }
    Tensor x = reshape(tape, state, {1, length_});
    Tensor h = relu(tape, conv1d(tape, x, w1_, b1_, Padding::Same));
    h = relu(tape, conv1d(tape, h, w2_, b2_, Padding::Same));
    Tensor residual = conv1d(tape, h, w3_, b3_, Padding::Same);
    return add(tape, reshape(tape, residual, {length_}), reshape(tape, state, {length_}));
}

std::vector<double> StepDenoiser::apply(std::span<const double> state) const {
    Tape tape(GradMode::Disabled);
    Tensor out = forward(tape, Tensor::vector(std::vector<double>(state.begin(), state.end())));
    return {out.values().begin(), out.values().end()};
}

std::vector<Tensor> StepDenoiser::parameters() const { return {w1_, b1_, w2_, b2_, w3_, b3_}; }

std::vector<std::pair<std::string, Tensor>> StepDenoiser::named_parameters() const {
    return {{"conv1.weight", w1_}, {"conv1.bias", b1_}, {"conv2.weight", w2_},
            {"conv2.bias", b2_},   {"conv3.weight", w3_}, {"conv3.bias", b3_}};
}

StepDenoiser StepDenoiser::clone() const {
    StepDenoiser copy = *this;
    copy.w1_ = w1_.clone();
    copy.b1_ = b1_.clone();
    copy.w2_ = w2_.clone();
    copy.b2_ = b2_.clone();
    copy.w3_ = w3_.clone();
    copy.b3_ = b3_.clone();
    return copy;
}

ReverseChain ReverseChain::clone() const {
    ReverseChain copy;
    copy.kind = kind;
    for (const auto& d : denoisers) copy.denoisers.push_back(d.clone());
    return copy;
}

// ---------------------------------------------------------------------------
// Training

void ChainTrainConfig::validate() const {
    if (epochs == 0) throw ConfigError("chain training needs at least one epoch");
    if (batch_size == 0) throw ConfigError("chain batch size must be positive");
    if (!(learning_rate > 0.0)) throw ConfigError("chain learning rate must be positive");
    if (noise_std < 0.0) throw ConfigError("noise_std must be non-negative");
    if (validation_every == 0) throw ConfigError("validation_every must be positive");
}

ReverseChain train_reverse_chain(std::span<const LabeledSeries> data, ChainKind kind,
                                 const NoiseSchedule& schedule, const ChainTrainConfig& config,
                                 Rng& rng, ChainTrainingHistory* history) {
    config.validate();
    const ChainData pools = chain_data(data, kind);
    const std::size_t length = data[pools.anchors.front()].length();
    for (const auto& s : data) {
        if (s.length() != length) {
            throw ShapeError("all series must share one length to train a chain");
        }
    }
    const std::size_t steps = schedule.steps();

    ReverseChain chain;
    chain.kind = kind;
    std::vector<Adam> optimizers;
    chain.denoisers.reserve(steps);
    optimizers.reserve(steps);
    for (std::size_t t = 1; t <= steps; ++t) {
        chain.denoisers.emplace_back(t, length, config.shape, rng);
        optimizers.emplace_back(chain.denoisers.back().parameters(),
                                AdamOptions{.learning_rate = config.learning_rate});
    }

    auto sample_trajectory = [&](std::size_t anchor) {
        const std::size_t partner = draw_partner(pools.partners, anchor, rng);
        return forward_trajectory(data, anchor, partner, schedule, config.noise_std, rng);
    };

    std::vector<ForwardTrajectory> validation;
    for (std::size_t k = 0; k < config.validation_size; ++k) {
        validation.push_back(sample_trajectory(pools.anchors[uniform_index(pools.anchors.size(), rng)]));
    }
    auto record_validation = [&](std::size_t epoch) {
        if (history == nullptr || validation.empty()) return;
        std::vector<double> per_step(steps, 0.0);
        for (std::size_t t = 1; t <= steps; ++t) {
            for (const auto& traj : validation) {
                const auto& anchor = data[traj.anchor_index];
                per_step[t - 1] += mse(chain.denoisers[t - 1].apply(traj.state(t, anchor)),
                                       traj.state(t - 1, anchor));
            }
            per_step[t - 1] /= static_cast<double>(validation.size());
        }
        history->epochs.push_back(epoch);
        history->validation_mse.push_back(std::move(per_step));
    };

    record_validation(0);
    std::vector<std::size_t> order = pools.anchors;
    for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
            const std::size_t stop = std::min(order.size(), start + config.batch_size);
            std::vector<ForwardTrajectory> batch;
            for (std::size_t i = start; i < stop; ++i) {
                batch.push_back(sample_trajectory(order[i]));
            }
            // Steps train independently on ground-truth (x^t, x^{t-1}) pairs.
            for (std::size_t t = 1; t <= steps; ++t) {
                Tape tape;
                std::vector<Tensor> errors;
                errors.reserve(batch.size());
                for (const auto& traj : batch) {
                    const auto& anchor = data[traj.anchor_index];
                    const auto input = traj.state(t, anchor);
                    const auto target = traj.state(t - 1, anchor);
                    Tensor prediction = chain.denoisers[t - 1].forward(
                        tape, Tensor::vector({input.begin(), input.end()}));
                    errors.push_back(squared_distance(
                        tape, prediction, Tensor::vector({target.begin(), target.end()})));
                }
                Tensor loss = scale(tape, add_n(tape, errors),
                                    1.0 / static_cast<double>(batch.size() * length));
                tape.backward(loss);
                optimizers[t - 1].step();
            }
        }
        if (epoch % config.validation_every == 0 || epoch == config.epochs) {
            record_validation(epoch);
        }
    }
    return chain;
}

ReverseChains train_reverse_chains(std::span<const LabeledSeries> data,
                                   const NoiseSchedule& schedule, const ChainTrainConfig& config,
                                   std::uint64_t seed, std::size_t jobs,
                                   std::array<ChainTrainingHistory, 4>* histories) {
    ReverseChains out;
    auto train_one = [&](ChainKind kind) {
        Rng rng = derive_rng(seed, static_cast<std::uint64_t>(kind), kChainSalt);
        auto* history = histories ? &(*histories)[static_cast<std::size_t>(kind)] : nullptr;
        out[kind] = train_reverse_chain(data, kind, schedule, config, rng, history);
    };
    if (jobs <= 1) {
        for (auto kind : kAllChainKinds) train_one(kind);
        return out;
    }
    std::vector<std::future<void>> pending;
    for (auto kind : kAllChainKinds) {
        pending.push_back(std::async(std::launch::async, train_one, kind));
        if (pending.size() >= jobs) {
            for (auto& f : pending) f.get();
            pending.clear();
        }
    }
    for (auto& f : pending) f.get();
    return out;
}

// ---------------------------------------------------------------------------
// Generation

std::vector<double> denoise_compose(const ReverseChain& chain, std::span<const double> state,
                                    std::size_t t, const std::function<void(std::size_t)>& on_step) {
    if (t == 0 || t > chain.steps()) {
        throw ConfigError("denoise_compose: step " + std::to_string(t) + " outside 1.." +
                          std::to_string(chain.steps()));
    }
    std::vector<double> current(state.begin(), state.end());
    for (std::size_t s = t; s >= 1; --s) {
        if (on_step) on_step(s);
        current = chain.denoisers[s - 1].apply(current);
    }
    return current;
}

std::vector<StepDenoisingReport> measure_denoising(const ReverseChain& chain,
                                                   std::span<const LabeledSeries> data,
                                                   const NoiseSchedule& schedule, double noise_std,
                                                   std::size_t trajectories, Rng& rng) {
    if (trajectories == 0) {
        throw ConfigError("measure_denoising needs at least one trajectory");
    }
    if (schedule.steps() != chain.steps()) {
        throw ConfigError("schedule and chain disagree on the number of steps");
    }
    const ChainData pools = chain_data(data, chain.kind);
    std::vector<StepDenoisingReport> reports(chain.steps());
    for (std::size_t n = 0; n < trajectories; ++n) {
        const std::size_t anchor = pools.anchors[uniform_index(pools.anchors.size(), rng)];
        const std::size_t partner = draw_partner(pools.partners, anchor, rng);
        const auto traj = forward_trajectory(data, anchor, partner, schedule, noise_std, rng);
        for (std::size_t t = 1; t <= chain.steps(); ++t) {
            const auto input = traj.state(t, data[anchor]);
            const auto target = traj.state(t - 1, data[anchor]);
            reports[t - 1].model_mse += mse(chain.denoisers[t - 1].apply(input), target);
            reports[t - 1].identity_mse += mse(input, target);
        }
    }
    for (auto& r : reports) {
        r.model_mse /= static_cast<double>(trajectories);
        r.identity_mse /= static_cast<double>(trajectories);
    }
    return reports;
}

ContrastiveSet generate_contrastive_set(std::span<const LabeledSeries> data,
                                        std::size_t anchor_index, const ReverseChains& chains,
                                        const NoiseSchedule& schedule, double noise_std, Rng& rng) {
    if (anchor_index >= data.size()) {
        throw DataError("anchor index out of range");
    }
    const int label = data[anchor_index].label;
    const int other = 1 - label;
    const auto same = indices_of_class(data, label);
    const auto different = indices_of_class(data, other);
    if (same.size() < 2 || different.empty()) {
        throw DataError("contrastive generation needs >= 2 series of the anchor's class and >= 1 "
                        "of the other class");
    }
    if (chains.steps() != schedule.steps()) {
        throw ConfigError("schedule and chains disagree on the number of steps");
    }

    ContrastiveSet set;
    set.anchor = data[anchor_index];
    set.anchor_index = anchor_index;
    set.positive_source = draw_partner(same, anchor_index, rng);
    set.negative_source = different[uniform_index(different.size(), rng)];

    const auto toward_anchor_pos =
        forward_trajectory(data, set.positive_source, anchor_index, schedule, noise_std, rng);
    const auto toward_anchor_neg =
        forward_trajectory(data, set.negative_source, anchor_index, schedule, noise_std, rng);
    const ReverseChain& within = chains[within_chain(label)];
    const ReverseChain& across = chains[across_chain(other, label)];
    for (std::size_t t = 1; t <= schedule.steps(); ++t) {
        set.positives.push_back(denoise_compose(within, toward_anchor_pos.states[t - 1], t));
        set.negatives.push_back(denoise_compose(across, toward_anchor_neg.states[t - 1], t));
    }
    return set;
}

std::vector<ContrastiveSet> generate_contrastive_sets(std::span<const LabeledSeries> data,
                                                      const ReverseChains& chains,
                                                      const NoiseSchedule& schedule,
                                                      double noise_std, std::uint64_t seed) {
    std::vector<ContrastiveSet> sets;
    sets.reserve(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        Rng rng = derive_rng(seed, i, kContrastSalt);
        sets.push_back(generate_contrastive_set(data, i, chains, schedule, noise_std, rng));
    }
    return sets;
}

}  // namespace cdnet
