// Copyright 2026 The CDNet Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"

#include "cdnet/error.hpp"
#include "cdnet/simgen.hpp"

using namespace cdnet;

namespace {

double at(const PatternParams& p, double t) {
    const std::vector<double> grid{t};
    return base_pattern(p, grid)[0];
}

}  // namespace

TEST_CASE("base pattern examples") {
    CHECK(at({1.0, 1.0, 0.0}, 0.25) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(at({2.0, 1.0, 0.0}, 0.0)) < 1e-15);
    CHECK(at({1.0, 2.0, std::numbers::pi / 2}, 0.0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("combined pattern degenerate mixtures") {
    const auto grid = time_grid(16);
    Rng rng = derive_rng(0, 0);
    const PatternParams p{0.7, 1.3, 0.4};
    const std::vector<PatternParams> one{p};
    const std::vector<double> w1{1.0};
    CHECK(combined_pattern(one, w1, 0.0, 0.0, grid, rng) == base_pattern(p, grid));

    const std::vector<PatternParams> twins{p, p};
    const std::vector<double> w2{0.3, 0.7};
    const auto mixed = combined_pattern(twins, w2, 0.0, 0.0, grid, rng);
    const auto ref = base_pattern(p, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) CHECK(mixed[i] == doctest::Approx(ref[i]).epsilon(1e-12));

    // The shift moves the time axis.
    const auto shifted = combined_pattern(one, w1, 0.1, 0.0, grid, rng);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(shifted[i] == doctest::Approx(at(p, grid[i] - 0.1)).epsilon(1e-12));
    }
}

TEST_CASE("combined pattern rejects invalid weights") {
    const auto grid = time_grid(8);
    Rng rng = derive_rng(0, 0);
    const std::vector<PatternParams> two{{1, 1, 0}, {1, 2, 0}};
    CHECK_THROWS_AS(combined_pattern(two, std::vector<double>{0.5, 0.6}, 0.0, 0.0, grid, rng), ConfigError);
    CHECK_THROWS_AS(combined_pattern(two, std::vector<double>{1.5, -0.5}, 0.0, 0.0, grid, rng), ConfigError);
    CHECK_THROWS_AS(combined_pattern(two, std::vector<double>{1.0}, 0.0, 0.0, grid, rng), ShapeError);
}

TEST_CASE("combined pattern noise moments over 10000 draws") {
    const std::vector<double> grid{0.3};
    const std::vector<PatternParams> one{{1.0, 1.0, 0.0}};
    const std::vector<double> w{1.0};
    const double sigma = 0.5;
    const double base = at(one[0], 0.3);
    Rng rng = derive_rng(99, 0);
    const std::size_t n = 10000;
    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = combined_pattern(one, w, 0.0, sigma, grid, rng)[0] - base;
        sum += r;
        sum_sq += r * r;
    }
    const double mean = sum / n;
    const double sd = std::sqrt(sum_sq / n - mean * mean);
    CHECK(std::abs(mean) < 3.0 * sigma / std::sqrt(static_cast<double>(n)));
    CHECK(std::abs(sd - sigma) / sigma < 0.05);
}

TEST_CASE("noise level sets sigma") {
    CHECK(noise_sigma(0) == doctest::Approx(0.3));
    CHECK(noise_sigma(2) == doctest::Approx(0.5));
    CHECK(noise_sigma(5) == doctest::Approx(0.8));
    CHECK_THROWS_AS(noise_sigma(6), ConfigError);
}

TEST_CASE("baseline intervals match the published listing") {
    const auto b = baseline_intervals();
    CHECK(b[0].frequency.lower == 1.0);
    CHECK(b[0].frequency.upper == 1.5);
    CHECK(b[0].amplitude.lower == 0.4);
    CHECK(b[0].amplitude.upper == 1.2);
    CHECK(b[0].phase.lower == 0.0);
    CHECK(b[0].phase.upper == 0.8);
    CHECK(b[1].frequency.lower == 1.1);
    CHECK(b[1].frequency.upper == 1.6);
    CHECK(b[1].amplitude.lower == 0.5);
    CHECK(b[1].amplitude.upper == 1.3);
    CHECK(b[1].phase.lower == 0.2);
    CHECK(b[1].phase.upper == 1.0);

    SimConfig most_similar;
    most_similar.similarity_level = 5;
    most_similar.multimodality_level = 5;
    const auto iv = class_intervals(most_similar);
    CHECK(iv[0].frequency.lower == doctest::Approx(1.0));
    CHECK(iv[1].frequency.upper == doctest::Approx(1.6));
}

TEST_CASE("similarity shifts and multimodality shrinks the intervals") {
    SimConfig c;
    c.similarity_level = 4;
    c.multimodality_level = 5;
    auto iv = class_intervals(c);
    CHECK(iv[0].frequency.lower == doctest::Approx(0.8));
    CHECK(iv[0].frequency.upper == doctest::Approx(1.3));
    CHECK(iv[1].frequency.lower == doctest::Approx(1.3));
    CHECK(iv[1].frequency.upper == doctest::Approx(1.8));

    c.similarity_level = 5;
    c.multimodality_level = 3;
    iv = class_intervals(c);
    CHECK(iv[0].amplitude.lower == doctest::Approx(0.5));
    CHECK(iv[0].amplitude.upper == doctest::Approx(1.1));
    CHECK(iv[1].phase.lower == doctest::Approx(0.3));
    CHECK(iv[1].phase.upper == doctest::Approx(0.9));

    // Narrowest setting keeps a positive width.
    c.multimodality_level = 0;
    iv = class_intervals(c);
    CHECK(iv[0].frequency.width() == doctest::Approx(kMinIntervalWidth));
    // Amplitude and frequency stay positive under the largest shift.
    c.multimodality_level = 5;
    c.similarity_level = 0;
    iv = class_intervals(c);
    CHECK(iv[0].amplitude.lower >= kPositiveFloor);
    CHECK(iv[0].frequency.lower >= kPositiveFloor);
    // Shifted below zero and then narrowed, class 0 amplitude has nothing left.
    c.multimodality_level = 0;
    CHECK_THROWS_AS(class_intervals(c), ConfigError);
}

TEST_CASE("a collapsed interval is rejected with the knob named") {
    SimConfig c;
    c.base[0].amplitude = {0.0, 0.2};
    c.similarity_level = 0;
    try {
        class_intervals(c);
        FAIL("expected a ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("similarity_level") != std::string::npos);
    }
    SimConfig d;
    d.noise_level = 7;
    CHECK_THROWS_AS(d.validate(), ConfigError);
}

TEST_CASE("dataset size, balance and split") {
    SimConfig c;
    c.n_per_class = 20;
    c.length = 32;
    std::vector<SimRecord> records;
    const auto d = generate_sim_dataset(c, &records);
    CHECK(d.train.size() + d.test.size() == 40);
    CHECK(indices_of_class(d.train, 0).size() == 10);
    CHECK(indices_of_class(d.train, 1).size() == 10);
    CHECK(indices_of_class(d.test, 0).size() == 10);
    CHECK(indices_of_class(d.test, 1).size() == 10);
    CHECK(d.length() == 32);
    CHECK_NOTHROW(d.validate());

    const auto iv = class_intervals(c);
    REQUIRE(records.size() == 40);
    for (const auto& r : records) {
        const auto& ci = iv[static_cast<std::size_t>(r.label)];
        REQUIRE(r.patterns.size() == c.patterns);
        double wsum = 0.0;
        for (double w : r.weights) wsum += w;
        CHECK(std::abs(wsum - 1.0) < 1e-9);
        CHECK(r.delta >= 0.0);
        CHECK(r.delta <= c.max_shift);
        for (const auto& p : r.patterns) {
            CHECK(ci.frequency.contains(p.frequency));
            CHECK(ci.amplitude.contains(p.amplitude));
            CHECK(ci.phase.contains(p.phase));
            CHECK(p.amplitude > 0.0);
            CHECK(p.frequency > 0.0);
        }
    }
}

TEST_CASE("generation is deterministic under a seed") {
    SimConfig c;
    c.n_per_class = 6;
    c.length = 16;
    const auto a = generate_sim_dataset(c);
    const auto b = generate_sim_dataset(c);
    c.seed = 1;
    const auto other = generate_sim_dataset(c);
    REQUIRE(a.train.size() == b.train.size());
    for (std::size_t i = 0; i < a.train.size(); ++i) CHECK(a.train[i].values == b.train[i].values);
    CHECK(a.train[0].values != other.train[0].values);
}

TEST_CASE("class centroids move together as similarity rises") {
    std::vector<double> distance(6, 0.0);
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        for (int level = 0; level <= 5; ++level) {
            SimConfig c;
            c.similarity_level = level;
            c.seed = seed;
            const auto d = generate_sim_dataset(c);
            std::vector<double> m0(c.length, 0.0), m1(c.length, 0.0);
            std::size_t n0 = 0, n1 = 0;
            for (const auto* split : {&d.train, &d.test}) {
                for (const auto& s : *split) {
                    auto& m = s.label == 0 ? m0 : m1;
                    (s.label == 0 ? n0 : n1) += 1;
                    for (std::size_t i = 0; i < c.length; ++i) m[i] += s.values[i];
                }
            }
            double dist = 0.0;
            for (std::size_t i = 0; i < c.length; ++i) {
                const double diff = m0[i] / n0 - m1[i] / n1;
                dist += diff * diff;
            }
            distance[static_cast<std::size_t>(level)] += std::sqrt(dist) / 3.0;
        }
    }
    for (std::size_t level = 1; level < distance.size(); ++level) {
        CAPTURE(level);
        CHECK(distance[level] <= distance[level - 1]);
    }
}

TEST_CASE("simulation configuration round-trips") {
    SimConfig c;
    c.noise_level = 4;
    c.seed = 77;
    c.max_shift = 0.15;
    const auto back = sim_config_from_json(to_json(c));
    CHECK(back.noise_level == 4);
    CHECK(back.seed == 77);
    CHECK(back.max_shift == 0.15);
    SimConfig d;
    CHECK(set_sim_field(d, "similarity_level", "1"));
    CHECK(d.similarity_level == 1);
    CHECK_FALSE(set_sim_field(d, "epochs_pretrain", "1"));
}
