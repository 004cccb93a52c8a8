// Copyright 2026 The CDNet Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace cdnet {

using Rng = std::mt19937_64;

/// Independent generator stream derived from (seed, stream, salt). Used to give
/// every anchor, chain or job its own reproducible stream.
Rng derive_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t salt = 0);

/// Vector of i.i.d. N(0, stddev^2) draws.
std::vector<double> normal_vector(std::size_t n, double stddev, Rng& rng);

/// Uniform index in [0, n).
std::size_t uniform_index(std::size_t n, Rng& rng);

/// Sample from Dirichlet(1, ..., 1) of dimension k.
std::vector<double> dirichlet_ones(std::size_t k, Rng& rng);

}  // namespace cdnet
