// Copyright 2026 The CDNet Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <vector>

#include "doctest.h"

#include "cdnet/error.hpp"
#include "cdnet/reverse_chain.hpp"
#include "support/fixtures.hpp"

using namespace cdnet;
using namespace cdnet::testing;

namespace {

ChainTrainConfig quick_config(std::size_t epochs, double noise_std) {
    ChainTrainConfig c;
    c.epochs = epochs;
    c.batch_size = 8;
    c.learning_rate = 3e-3;
    c.noise_std = noise_std;
    c.shape = DenoiserShape{8, 5, true};
    c.validation_size = 16;
    c.validation_every = 5;
    return c;
}

std::vector<double> parameter_values(const ReverseChain& chain) {
    std::vector<double> out;
    for (const auto& d : chain.denoisers) {
        for (const auto& p : d.parameters()) out.insert(out.end(), p.values().begin(), p.values().end());
    }
    return out;
}

}  // namespace

TEST_CASE("chain kinds map to source and partner classes") {
    CHECK(source_class(ChainKind::Within0) == 0);
    CHECK(partner_class(ChainKind::Within0) == 0);
    CHECK(source_class(ChainKind::Across01) == 0);
    CHECK(partner_class(ChainKind::Across01) == 1);
    CHECK(source_class(ChainKind::Across10) == 1);
    CHECK(partner_class(ChainKind::Across10) == 0);
    CHECK(within_chain(1) == ChainKind::Within1);
    CHECK(across_chain(1, 0) == ChainKind::Across10);
    CHECK_THROWS_AS(across_chain(1, 1), ConfigError);
    for (auto k : kAllChainKinds) CHECK(chain_kind_from_string(to_string(k)) == k);
    CHECK_THROWS_AS(chain_kind_from_string("sideways"), DataError);
}

TEST_CASE("an untrained denoiser is the identity and keeps the length") {
    Rng rng = derive_rng(0, 0);
    const StepDenoiser d(1, 12, DenoiserShape{}, rng);
    std::vector<double> x(12);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::sin(static_cast<double>(i));
    CHECK(d.apply(x) == x);
    CHECK_THROWS_AS(d.apply(std::vector<double>(11, 0.0)), ShapeError);
}

TEST_CASE("constant classes without noise are reconstructed almost exactly") {
    const auto data = constant_classes(16, 6, 0.7, -0.4);
    Rng rng = derive_rng(1, 0);
    ChainTrainingHistory history;
    const auto chain = train_reverse_chain(data, ChainKind::Within0, linear_schedule(3, 0.05, 0.3),
                                           quick_config(10, 0.0), rng, &history);
    REQUIRE(!history.validation_mse.empty());
    for (double m : history.validation_mse.back()) CHECK(m < 1e-4);
    // Composed output lands on the class constant.
    const auto out = denoise_compose(chain, std::vector<double>(16, 0.7), 3);
    for (double v : out) CHECK(std::abs(v - 0.7) < 1e-2);
}

TEST_CASE("training requires two series of every referenced class") {
    auto data = constant_classes(16, 2, 0.0, 1.0);
    data.pop_back();
    Rng rng = derive_rng(1, 0);
    CHECK_THROWS_AS(train_reverse_chain(data, ChainKind::Within1, linear_schedule(2, 0.1, 0.2),
                                        quick_config(1, 0.1), rng),
                    DataError);
    CHECK_THROWS_AS(train_reverse_chain(data, ChainKind::Across01, linear_schedule(2, 0.1, 0.2),
                                        quick_config(1, 0.1), rng),
                    DataError);
    CHECK_NOTHROW(train_reverse_chain(data, ChainKind::Within0, linear_schedule(2, 0.1, 0.2),
                                      quick_config(1, 0.1), rng));
}

TEST_CASE("a trained bimodal chain beats the identity at every step") {
    const auto data = bimodal_dataset(32, 24, 1.0, 0.1, 3);
    const auto sched = linear_schedule(3, 0.05, 0.3);
    Rng rng = derive_rng(2, 0);
    ChainTrainingHistory history;
    // Larger batches and a smaller step: at quick settings the plateau
    // jitter alone exceeds the 5% band checked below.
    auto config = quick_config(80, 0.25);
    config.batch_size = 32;
    config.learning_rate = 3e-4;
    const auto chain = train_reverse_chain(data, ChainKind::Within0, sched, config, rng, &history);
    Rng eval_rng = derive_rng(2, 1);
    const auto reports = measure_denoising(chain, data, sched, 0.25, 200, eval_rng);
    REQUIRE(reports.size() == 3);
    for (const auto& r : reports) CHECK(r.model_mse < r.identity_mse);

    // Validation loss on the fixed batch drifts down: every checkpoint stays
    // within 5% of the best value seen before it, and the end beats the start.
    for (std::size_t t = 0; t < 3; ++t) {
        double best = history.validation_mse.front()[t];
        for (const auto& row : history.validation_mse) {
            CHECK(row[t] <= best * 1.05);
            best = std::min(best, row[t]);
        }
        CHECK(history.validation_mse.back()[t] < history.validation_mse.front()[t]);
    }
}

TEST_CASE("chain training is deterministic under a seed and independent of jobs") {
    const auto data = bimodal_dataset(16, 6, 1.0, 0.1, 4);
    const auto sched = linear_schedule(2, 0.05, 0.3);
    const auto a = train_reverse_chains(data, sched, quick_config(3, 0.25), 9, 1);
    const auto b = train_reverse_chains(data, sched, quick_config(3, 0.25), 9, 4);
    for (auto k : kAllChainKinds) {
        CHECK(a[k].kind == k);
        CHECK(a[k].steps() == 2);
        CHECK(parameter_values(a[k]) == parameter_values(b[k]));
    }
    // No storage is shared between chains or between steps.
    for (auto k1 : kAllChainKinds) {
        for (std::size_t t1 = 0; t1 < 2; ++t1) {
            for (auto k2 : kAllChainKinds) {
                for (std::size_t t2 = 0; t2 < 2; ++t2) {
                    if (k1 == k2 && t1 == t2) continue;
                    const auto p1 = a[k1].denoisers[t1].parameters();
                    const auto p2 = a[k2].denoisers[t2].parameters();
                    for (const auto& x : p1) {
                        for (const auto& y : p2) CHECK_FALSE(x.aliases(y));
                    }
                }
            }
        }
    }
}

TEST_CASE("denoise_compose applies steps t down to 1 exactly once each") {
    Rng rng = derive_rng(0, 0);
    ReverseChain chain;
    for (std::size_t t = 1; t <= 4; ++t) chain.denoisers.emplace_back(t, 8, DenoiserShape{}, rng);
    std::vector<std::size_t> seen;
    denoise_compose(chain, std::vector<double>(8, 1.0), 4, [&](std::size_t s) { seen.push_back(s); });
    CHECK(seen == std::vector<std::size_t>{4, 3, 2, 1});
    seen.clear();
    denoise_compose(chain, std::vector<double>(8, 1.0), 1, [&](std::size_t s) { seen.push_back(s); });
    CHECK(seen == std::vector<std::size_t>{1});
    CHECK_THROWS_AS(denoise_compose(chain, std::vector<double>(8, 1.0), 0), ConfigError);
    CHECK_THROWS_AS(denoise_compose(chain, std::vector<double>(8, 1.0), 5), ConfigError);
}

TEST_CASE("contrastive sets draw partners from the right classes") {
    const auto data = bimodal_dataset(16, 6, 1.0, 0.1, 5);
    const auto sched = linear_schedule(2, 0.05, 0.3);
    const auto chains = train_reverse_chains(data, sched, quick_config(2, 0.25), 1);
    const auto sets = generate_contrastive_sets(data, chains, sched, 0.25, 7);
    REQUIRE(sets.size() == data.size());
    for (const auto& s : sets) {
        CHECK(s.positive_source != s.anchor_index);
        CHECK(data[s.positive_source].label == s.anchor.label);
        CHECK(data[s.negative_source].label != s.anchor.label);
        REQUIRE(s.positives.size() == 2);
        REQUIRE(s.negatives.size() == 2);
        for (const auto& x : s.positives) {
            CHECK(x.size() == 16);
            for (double v : x) CHECK(std::isfinite(v));
        }
        for (const auto& x : s.negatives) {
            CHECK(x.size() == 16);
            for (double v : x) CHECK(std::isfinite(v));
        }
    }
    const auto again = generate_contrastive_sets(data, chains, sched, 0.25, 7);
    CHECK(again[3].positives == sets[3].positives);
    CHECK(again[3].negatives == sets[3].negatives);
}

TEST_CASE("one-step positives of constant classes equal the class constant") {
    const auto data = constant_classes(12, 4, 1.5, -1.5);
    const auto sched = NoiseSchedule({0.2});
    auto cfg = quick_config(10, 0.0);
    const auto chains = train_reverse_chains(data, sched, cfg, 3);
    Rng rng = derive_rng(3, 3);
    const auto set = generate_contrastive_set(data, 0, chains, sched, 0.0, rng);
    for (double v : set.positives[0]) CHECK(std::abs(v - 1.5) < 1e-2);
}

TEST_CASE("contrastive generation needs enough class members") {
    auto data = constant_classes(12, 2, 1.0, -1.0);
    const auto sched = NoiseSchedule({0.2});
    const auto chains = train_reverse_chains(data, sched, quick_config(1, 0.0), 3);
    std::vector<LabeledSeries> lonely{data[0], data[2], data[3]};
    Rng rng = derive_rng(0, 0);
    CHECK_THROWS_AS(generate_contrastive_set(lonely, 0, chains, sched, 0.0, rng), DataError);
    CHECK_THROWS_AS(generate_contrastive_set(data, 9, chains, sched, 0.0, rng), DataError);
}

TEST_CASE("across chains pull mixed states back toward their source class") {
    const auto data = bimodal_dataset(32, 24, 0.6, 0.1, 6);
    const auto sched = linear_schedule(3, 0.05, 0.3);
    Rng rng = derive_rng(6, 0);
    const auto chain = train_reverse_chain(data, ChainKind::Across10, sched, quick_config(40, 0.25), rng);

    std::vector<double> centroid(32, 0.0);
    const auto ones = indices_of_class(data, 1);
    for (auto i : ones) for (std::size_t k = 0; k < 32; ++k) centroid[k] += data[i].values[k] / ones.size();

    const auto zeros = indices_of_class(data, 0);
    Rng eval = derive_rng(6, 1);
    for (std::size_t t = 1; t <= 3; ++t) {
        double raw = 0.0, composed = 0.0;
        for (std::size_t n = 0; n < 100; ++n) {
            const auto a = ones[uniform_index(ones.size(), eval)];
            const auto p = zeros[uniform_index(zeros.size(), eval)];
            const auto tr = forward_trajectory(data, a, p, sched, 0.25, eval);
            raw += mean_squared_distance(tr.states[t - 1], centroid);
            composed += mean_squared_distance(denoise_compose(chain, tr.states[t - 1], t), centroid);
        }
        CAPTURE(t);
        CHECK(composed < raw);
    }
}
