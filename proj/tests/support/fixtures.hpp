// Copyright 2026 The CDNet Authors
// SPDX-License-Identifier: Apache-2.0

// Small synthetic datasets shared by unit and acceptance tests.

#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include "cdnet/dataio.hpp"
#include "cdnet/random.hpp"

namespace cdnet::testing {

/// Every class-0 series equals c0 and every class-1 series equals c1.
inline std::vector<LabeledSeries> constant_classes(std::size_t length, std::size_t per_class,
                                                   double c0, double c1) {
    std::vector<LabeledSeries> out;
    for (int label : {0, 1}) {
        for (std::size_t i = 0; i < per_class; ++i) {
            out.push_back({std::vector<double>(length, label == 0 ? c0 : c1), label, {}});
        }
    }
    return out;
}

/// Mode centers of the bimodal fixture: a sine profile shifted by +offset and
/// -offset.
inline std::vector<double> bimodal_center(std::size_t length, int mode, double offset) {
    std::vector<double> c(length);
    for (std::size_t i = 0; i < length; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(length - 1);
        c[i] = 0.5 * std::sin(2.0 * std::numbers::pi * t) + (mode == 0 ? offset : -offset);
    }
    return c;
}

/// Class 0 alternates between two modes (centers +-offset around a sine);
/// class 1 is a single cosine profile. Every point gets N(0, noise_sd) noise.
inline std::vector<LabeledSeries> bimodal_dataset(std::size_t length, std::size_t per_class,
                                                  double offset, double noise_sd,
                                                  std::uint64_t seed) {
    Rng rng = derive_rng(seed, 0, 0xB1);
    std::vector<LabeledSeries> out;
    for (std::size_t i = 0; i < per_class; ++i) {
        auto v = bimodal_center(length, static_cast<int>(i % 2), offset);
        const auto n = normal_vector(length, noise_sd, rng);
        for (std::size_t k = 0; k < length; ++k) v[k] += n[k];
        out.push_back({std::move(v), 0, "mode" + std::to_string(i % 2)});
    }
    for (std::size_t i = 0; i < per_class; ++i) {
        std::vector<double> v(length);
        const auto n = normal_vector(length, noise_sd, rng);
        for (std::size_t k = 0; k < length; ++k) {
            const double t = static_cast<double>(k) / static_cast<double>(length - 1);
            v[k] = 0.8 * std::cos(2.0 * std::numbers::pi * t) + n[k];
        }
        out.push_back({std::move(v), 1, {}});
    }
    return out;
}

inline double mean_squared_distance(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return s / static_cast<double>(a.size());
}

}  // namespace cdnet::testing
