// Copyright 2026 The CDNet Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"

#include "cdnet/diffusion.hpp"
#include "cdnet/error.hpp"
#include "cdnet/random.hpp"

using namespace cdnet;

namespace {

LabeledSeries series(std::vector<double> v, int label) { return {std::move(v), label, {}}; }

}  // namespace

TEST_CASE("linear schedule examples") {
    CHECK(linear_schedule(5, 0.01, 0.3).beta(3) == doctest::Approx(0.155).epsilon(1e-12));
    CHECK(linear_schedule(1, 0.1, 0.1).betas() == std::vector<double>{0.1});
    CHECK(linear_schedule(2, 0.05, 0.05).betas() == std::vector<double>{0.05, 0.05});
    const auto s = linear_schedule(5, 0.05, 0.3);
    CHECK(s.beta(1) == 0.05);
    CHECK(s.beta(5) == doctest::Approx(0.3));
}

TEST_CASE("schedules reject out-of-range or decreasing betas") {
    CHECK_THROWS_AS(linear_schedule(0, 0.1, 0.2), ConfigError);
    CHECK_THROWS_AS(linear_schedule(3, 0.0, 0.2), ConfigError);
    CHECK_THROWS_AS(linear_schedule(3, 0.3, 0.2), ConfigError);
    CHECK_THROWS_AS(linear_schedule(3, 0.1, 1.0), ConfigError);
    CHECK_THROWS_AS(NoiseSchedule({0.2, 0.1}), ConfigError);
    CHECK_NOTHROW(NoiseSchedule::allow_degenerate({0.0, 1.0}));
    CHECK_THROWS_AS(NoiseSchedule::allow_degenerate({1.5}), ConfigError);
    CHECK_THROWS_AS(linear_schedule(3, 0.1, 0.2).beta(0), ConfigError);
}

TEST_CASE("forward step examples") {
    CHECK(forward_step(std::vector<double>{1, 1}, std::vector<double>{0, 0}, 0.0,
                       std::vector<double>{0, 0}) == std::vector<double>{1, 1});
    CHECK(forward_step(std::vector<double>{5, 5}, std::vector<double>{2, 2}, 1.0,
                       std::vector<double>{0, 0}) == std::vector<double>{2, 2});
    const auto y = forward_step(std::vector<double>{1, 0}, std::vector<double>{1, 1}, 0.19,
                                std::vector<double>{0, 0});
    CHECK(y[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(y[1] == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("forward step adds sqrt(beta) times the noise") {
    const auto y = forward_step(std::vector<double>{0}, std::vector<double>{0}, 0.25,
                                std::vector<double>{2});
    CHECK(y[0] == doctest::Approx(1.0));
    CHECK_THROWS_AS(forward_step(std::vector<double>{0, 1}, std::vector<double>{0}, 0.2,
                                 std::vector<double>{0, 0}),
                    ShapeError);
}

TEST_CASE("zero-noise trajectories") {
    Rng rng = derive_rng(0, 0);
    const auto a = series({1, 0}, 0);
    const auto p = series({1, 1}, 0);
    const auto tr = forward_trajectory(a, p, NoiseSchedule({0.19, 0.19}), 0.0, rng);
    REQUIRE(tr.states.size() == 2);
    CHECK(tr.states[0][0] == doctest::Approx(1.0));
    CHECK(tr.states[0][1] == doctest::Approx(0.1));
    CHECK(tr.states[1][0] == doctest::Approx(1.0));
    CHECK(tr.states[1][1] == doctest::Approx(0.19));
    CHECK(tr.kind == ProcessKind::Within);

    const auto all_ones = NoiseSchedule::allow_degenerate({1.0, 1.0, 1.0});
    const auto q = series({-3, 4}, 1);
    const auto tr2 = forward_trajectory(a, q, all_ones, 0.0, rng);
    CHECK(tr2.kind == ProcessKind::Across);
    for (const auto& s : tr2.states) CHECK(s == q.values);
}

TEST_CASE("trajectories record their noise and reproduce under a seed") {
    const auto a = series({0.3, -0.2, 0.8, 1.1}, 0);
    const auto p = series({-0.5, 0.4, 0.1, 0.0}, 1);
    const auto sched = linear_schedule(4, 0.05, 0.3);
    Rng r1 = derive_rng(42, 7), r2 = derive_rng(42, 7);
    const auto t1 = forward_trajectory(a, p, sched, 0.25, r1);
    const auto t2 = forward_trajectory(a, p, sched, 0.25, r2);
    CHECK(t1.states == t2.states);
    CHECK(t1.noise_draws == t2.noise_draws);
    REQUIRE(t1.noise_draws.size() == 4);
    // Replaying the recorded noise through forward_step reproduces each state.
    std::vector<double> prev = a.values;
    for (std::size_t t = 1; t <= 4; ++t) {
        const auto next = forward_step(prev, p.values, sched.beta(t), t1.noise_draws[t - 1]);
        CHECK(next == t1.states[t - 1]);
        prev = next;
    }
    CHECK(std::vector<double>(t1.state(0, a).begin(), t1.state(0, a).end()) == a.values);
}

TEST_CASE("trajectory rejects length mismatches and bad indices") {
    Rng rng = derive_rng(0, 0);
    CHECK_THROWS_AS(forward_trajectory(series({1, 2}, 0), series({1}, 0), linear_schedule(2, 0.1, 0.2),
                                       0.1, rng),
                    ShapeError);
    std::vector<LabeledSeries> data{series({1, 2}, 0), series({3, 4}, 1)};
    CHECK_THROWS(forward_trajectory(data, 0, 5, linear_schedule(2, 0.1, 0.2), 0.1, rng));
    const auto tr = forward_trajectory(data, 0, 1, linear_schedule(2, 0.1, 0.2), 0.1, rng);
    CHECK(tr.anchor_index == 0);
    CHECK(tr.partner_index == 1);
    CHECK(tr.kind == ProcessKind::Across);
}

TEST_CASE("noise-free states stay between the previous state and the partner") {
    Rng rng = derive_rng(5, 5);
    std::uniform_real_distribution<double> u(-2, 2);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> x(16), p(16);
        for (auto& v : x) v = u(rng);
        for (auto& v : p) v = u(rng);
        const auto sched = linear_schedule(5, 0.05, 0.3);
        const auto tr = forward_trajectory(series(x, 0), series(p, 1), sched, 0.0, rng);
        std::vector<double> prev = x;
        for (const auto& s : tr.states) {
            for (std::size_t i = 0; i < s.size(); ++i) {
                CHECK(s[i] >= std::min(prev[i], p[i]) - 1e-15);
                CHECK(s[i] <= std::max(prev[i], p[i]) + 1e-15);
            }
            prev = s;
        }
    }
}

TEST_CASE("forward step moments over 10000 draws") {
    const double beta = 0.2, sd = 0.25;
    const std::vector<double> prev{0.7}, partner{-1.3};
    Rng rng = derive_rng(123, 0);
    const std::size_t n = 10000;
    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto eps = normal_vector(1, sd, rng);
        const double y = forward_step(prev, partner, beta, eps)[0];
        sum += y;
        sum_sq += y * y;
    }
    const double mean = sum / n;
    const double var = sum_sq / n - mean * mean;
    const double c = std::sqrt(1.0 - beta);
    const double expected_mean = c * prev[0] + (1.0 - c) * partner[0];
    const double expected_var = beta * sd * sd;
    CHECK(std::abs(mean - expected_mean) < 3.0 * std::sqrt(expected_var / n));
    CHECK(std::abs(var - expected_var) / expected_var < 0.05);
}
