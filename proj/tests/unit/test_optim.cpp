// Copyright 2026 The CDNet Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include "doctest.h"

#include "cdnet/error.hpp"
#include "cdnet/optim.hpp"
#include "cdnet/random.hpp"
#include "support/gradcheck.hpp"

using namespace cdnet;

namespace {

// One Adam step on f(w) = (w - target)^2.
void quadratic_step(Adam& adam, const Tensor& w, double target) {
    Tape tape;
    const Tensor d = add_scalar(tape, w, -target);
    tape.backward(sum(tape, mul(tape, d, d)));
    adam.step();
}

}  // namespace

TEST_CASE("one step on w^2 from 1 moves downhill") {
    const Tensor w({1.0}, {1}, true);
    Adam adam({w}, {.learning_rate = 0.1});
    quadratic_step(adam, w, 0.0);
    CHECK(w.item() < 1.0);
    // First Adam step moves by lr in the gradient's sign direction.
    CHECK(w.item() == doctest::Approx(0.9).epsilon(1e-6));
    CHECK(w.grad()[0] == 0.0);
}

TEST_CASE("a zero gradient leaves parameters unchanged") {
    const Tensor w({1.5, -2.0}, {2}, true);
    Adam adam({w});
    adam.step();
    CHECK(w.values()[0] == 1.5);
    CHECK(w.values()[1] == -2.0);
}

TEST_CASE("500 steps on (w - 3)^2 converge") {
    const Tensor w({0.0}, {1}, true);
    Adam adam({w}, {.learning_rate = 0.05});
    for (int i = 0; i < 500; ++i) quadratic_step(adam, w, 3.0);
    CHECK(std::abs(w.item() - 3.0) < 0.01);
}

TEST_CASE("Adam rejects invalid hyperparameters") {
    const Tensor w({0.0}, {1}, true);
    CHECK_THROWS_AS(Adam({w}, {.learning_rate = 0.0}), ConfigError);
    CHECK_THROWS_AS(Adam({w}, {.learning_rate = -1.0}), ConfigError);
    CHECK_THROWS_AS(Adam({w}, {.beta1 = 1.0}), ConfigError);
    CHECK_THROWS_AS(Adam({w}, {.epsilon = 0.0}), ConfigError);
}

TEST_CASE("parameters that do not require gradients are skipped") {
    const Tensor w({1.0}, {1}, true);
    const Tensor frozen({1.0}, {1}, true);
    Adam adam({w, frozen}, {.learning_rate = 0.1});
    frozen.mutable_grad()[0] = 5.0;
    Tensor handle = frozen;
    handle.set_requires_grad(false);
    quadratic_step(adam, w, 0.0);
    CHECK(frozen.item() == 1.0);
    CHECK(w.item() < 1.0);
}

TEST_CASE("identical seeds give bit-identical trajectories over 100 steps") {
    auto run = [] {
        const auto net = cdnet::testing::make_random_network(9);
        Adam adam(net.parameters(), {.learning_rate = 1e-2});
        for (int i = 0; i < 100; ++i) {
            Tape tape;
            tape.backward(net.forward(tape));
            adam.step();
        }
        std::vector<double> out;
        for (const auto& p : net.parameters()) out.insert(out.end(), p.values().begin(), p.values().end());
        return out;
    };
    CHECK(run() == run());
}

TEST_CASE("uniform fan-in initialization stays within bounds") {
    Rng rng = derive_rng(1, 2);
    Tensor t = Tensor::zeros({8, 4, 5});
    init_uniform_fan_in(t, 20, rng);
    const double s = std::sqrt(1.0 / 20.0);
    bool any_nonzero = false;
    for (double v : t.values()) {
        CHECK(std::abs(v) <= s);
        any_nonzero = any_nonzero || v != 0.0;
    }
    CHECK(any_nonzero);
}
