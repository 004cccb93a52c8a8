// Copyright 2026 The CDNet Authors
// SPDX-License-Identifier: Apache-2.0

#include "cdnet/optim.hpp"

#include <algorithm>
#include <cmath>

#include "cdnet/error.hpp"

namespace cdnet {

Adam::Adam(std::vector<Tensor> parameters, AdamOptions options)
    : parameters_(std::move(parameters)), options_(options) {
    if (!(options_.learning_rate > 0.0)) {
        throw ConfigError("Adam learning rate must be positive");
    }
    if (!(options_.beta1 >= 0.0 && options_.beta1 < 1.0 && options_.beta2 >= 0.0 &&
          options_.beta2 < 1.0)) {
        throw ConfigError("Adam betas must lie in [0, 1)");
    }
    if (!(options_.epsilon > 0.0)) {
        throw ConfigError("Adam epsilon must be positive");
    }
    for (const auto& p : parameters_) {
        first_moment_.emplace_back(p.size(), 0.0);
        second_moment_.emplace_back(p.size(), 0.0);
    }
}

void Adam::step() {
    ++steps_;
    const double b1 = options_.beta1;
    const double b2 = options_.beta2;
    const double correction1 = 1.0 - std::pow(b1, static_cast<double>(steps_));
    const double correction2 = 1.0 - std::pow(b2, static_cast<double>(steps_));
    for (std::size_t k = 0; k < parameters_.size(); ++k) {
        auto& p = parameters_[k];
        if (!p.requires_grad()) {
            continue;
        }
        auto values = p.mutable_values();
        const auto grad = p.grad();
        auto& m = first_moment_[k];
        auto& v = second_moment_[k];
        for (std::size_t i = 0; i < values.size(); ++i) {
            m[i] = b1 * m[i] + (1.0 - b1) * grad[i];
            v[i] = b2 * v[i] + (1.0 - b2) * grad[i] * grad[i];
            const double m_hat = m[i] / correction1;
            const double v_hat = v[i] / correction2;
            values[i] -= options_.learning_rate * m_hat / (std::sqrt(v_hat) + options_.epsilon);
        }
    }
    zero_grad();
}

void Adam::zero_grad() {
    for (auto& p : parameters_) {
        p.zero_grad();
    }
}

void init_uniform_fan_in(Tensor& tensor, std::size_t fan_in, Rng& rng) {
    const double bound = std::sqrt(1.0 / static_cast<double>(std::max<std::size_t>(fan_in, 1)));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (auto& v : tensor.mutable_values()) {
        v = dist(rng);
    }
}

}  // namespace cdnet
