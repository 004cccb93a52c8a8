// Copyright 2026 The CDNet Authors
// SPDX-License-Identifier: Apache-2.0

#include "cdnet/random.hpp"

#include <numeric>

namespace cdnet {

Rng derive_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t salt) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                      static_cast<std::uint32_t>(salt), static_cast<std::uint32_t>(salt >> 32)};
    return Rng(seq);
}

std::vector<double> normal_vector(std::size_t n, double stddev, Rng& rng) {
    std::vector<double> out(n, 0.0);
    if (stddev == 0.0) {
        return out;
    }
    std::normal_distribution<double> dist(0.0, stddev);
    for (auto& v : out) {
        v = dist(rng);
    }
    return out;
}

std::size_t uniform_index(std::size_t n, Rng& rng) {
    std::uniform_int_distribution<std::size_t> dist(0, n - 1);
    return dist(rng);
}

std::vector<double> dirichlet_ones(std::size_t k, Rng& rng) {
    // Gamma(1) is Exp(1); normalizing k of them gives Dirichlet(1, ..., 1).
    std::exponential_distribution<double> dist(1.0);
    std::vector<double> w(k);
    for (auto& v : w) {
        v = dist(rng);
    }
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    for (auto& v : w) {
        v /= total;
    }
    return w;
}

}  // namespace cdnet
