// Copyright 2026 The CDNet Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <vector>

#include "cdnet/random.hpp"
#include "cdnet/tensor.hpp"

namespace cdnet {

struct AdamOptions {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

/// Adam with bias-corrected moments. step() applies one update to every
/// parameter that currently requires a gradient and then zeroes all gradients,
/// so parameters with requires_grad() == false are never modified.
class Adam {
public:
    explicit Adam(std::vector<Tensor> parameters, AdamOptions options = {});

    void step();
    void zero_grad();

    const AdamOptions& options() const { return options_; }
    std::size_t steps() const { return steps_; }
    const std::vector<Tensor>& parameters() const { return parameters_; }

private:
    std::vector<Tensor> parameters_;
    std::vector<std::vector<double>> first_moment_;
    std::vector<std::vector<double>> second_moment_;
    AdamOptions options_;
    std::size_t steps_ = 0;
};

/// Fills a tensor with uniform(-s, s), s = sqrt(1 / fan_in).
void init_uniform_fan_in(Tensor& tensor, std::size_t fan_in, Rng& rng);

}  // namespace cdnet
