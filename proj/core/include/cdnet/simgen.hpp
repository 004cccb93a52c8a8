// Copyright 2026 The CDNet Authors
// SPDX-License-Identifier: Apache-2.0

// Sinusoidal benchmark generator. Each series mixes k random sine patterns
//
//   C(t) = sum_j w_j A_j sin(2 pi f_j (t - delta) + phi_j) + N(0, sigma^2)
//
// with Dirichlet(1, ..., 1) weights and per-class parameter intervals. Three
// integer knobs in [0, 5] control difficulty: noise raises sigma, similarity
// pulls the two classes' intervals together, multimodality widens them.

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cdnet/dataio.hpp"
#include "cdnet/random.hpp"

namespace cdnet {

struct PatternParams {
    double amplitude = 1.0;
    double frequency = 1.0;
    double phase = 0.0;
};

struct Interval {
    double lower = 0.0;
    double upper = 0.0;

    bool contains(double v) const { return v >= lower && v <= upper; }
    double width() const { return upper - lower; }
};

struct ClassIntervals {
    Interval frequency;
    Interval amplitude;
    Interval phase;
};

/// Class 0 and class 1 intervals at the most similar and most multimodal
/// setting (similarity 5, multimodality 5).
std::array<ClassIntervals, 2> baseline_intervals();

inline constexpr int kMaxLevel = 5;
/// Lower bound kept on amplitude and frequency after intervals are shifted.
inline constexpr double kPositiveFloor = 0.05;
/// Narrowest interval the multimodality shrink can produce.
inline constexpr double kMinIntervalWidth = 0.02;

struct SimConfig {
    int noise_level = 0;
    int similarity_level = 4;
    int multimodality_level = 5;
    std::size_t n_per_class = 50;
    std::size_t length = 128;
    std::size_t patterns = 3;
    std::uint64_t seed = 0;
    /// The shift delta is drawn uniformly from [0, max_shift].
    double max_shift = 0.2;
    std::array<ClassIntervals, 2> base = baseline_intervals();

    void validate() const;
};

std::string to_json(const SimConfig& config);
SimConfig sim_config_from_json(const std::string& text, SimConfig base = {});
bool set_sim_field(SimConfig& config, const std::string& key, const std::string& value);
std::vector<std::string> sim_field_names();

/// 0.3 + 0.1 * level.
double noise_sigma(int noise_level);

/// Per-class intervals after applying the similarity and multimodality knobs.
/// Throws ConfigError naming the knob when an interval collapses.
std::array<ClassIntervals, 2> class_intervals(const SimConfig& config);

/// M points evenly spaced over [0, 1].
std::vector<double> time_grid(std::size_t length);

std::vector<double> base_pattern(const PatternParams& params, std::span<const double> grid);

std::vector<double> combined_pattern(std::span<const PatternParams> patterns,
                                     std::span<const double> weights, double delta, double sigma,
                                     std::span<const double> grid, Rng& rng);

/// Parameters drawn for one generated series.
struct SimRecord {
    int label = 0;
    bool train = true;
    std::vector<PatternParams> patterns;
    std::vector<double> weights;
    double delta = 0.0;
};

/// Generates n_per_class series per class and splits each class in half
/// (train gets the extra series when n_per_class is odd). `records`, when
/// given, receives the drawn parameters in train-then-test order.
Dataset generate_sim_dataset(const SimConfig& config, std::vector<SimRecord>* records = nullptr);

}  // namespace cdnet
