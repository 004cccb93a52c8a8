// Copyright 2026 The CDNet Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "cdnet/classifier.hpp"
#include "cdnet/dataio.hpp"
#include "cdnet/simgen.hpp"
#include "cdnet/train_config.hpp"

namespace cdnet {

struct Accuracy {
    std::size_t correct = 0;
    std::size_t total = 0;
    double value() const { return static_cast<double>(correct) / static_cast<double>(total); }
};

Accuracy evaluate(const BaseClassifier& classifier, std::span<const LabeledSeries> test);

struct RunResult {
    std::string dataset_name;
    std::string method_name;
    double accuracy = 0.0;
    std::size_t correct = 0;
    std::size_t total = 0;
    std::uint64_t seed = 0;
    /// Flat JSON echo of the TrainConfig (and SimConfig, when simulated).
    std::string config_echo;
    double wall_time = 0.0;
};

/// A named way of turning a training split into a classifier.
struct Method {
    std::string name;
    std::function<std::unique_ptr<BaseClassifier>(std::span<const LabeledSeries>, const TrainConfig&)>
        train;
};

Method baseline_method();
Method cdnet_method();

struct Comparison {
    std::vector<RunResult> first;
    std::vector<RunResult> second;
    double mean_first = 0.0;
    double mean_second = 0.0;
    /// mean(second) - mean(first).
    double delta = 0.0;
};

/// Runs both methods on the same splits for every seed. Jobs fan out over
/// (seed, method) pairs; results come back ordered by seed.
Comparison compare_arms(const Dataset& dataset, const TrainConfig& config,
                        std::span<const std::uint64_t> seeds, const Method& first,
                        const Method& second, std::size_t jobs = 1,
                        const std::string& extra_echo = {});

/// Baseline (first) against the full pipeline (second).
Comparison compare_methods(const Dataset& dataset, const TrainConfig& config,
                           std::span<const std::uint64_t> seeds, std::size_t jobs = 1,
                           const std::string& extra_echo = {});

enum class Knob { Noise, Similarity, Multimodality };
std::string to_string(Knob knob);
Knob knob_from_string(const std::string& name);
SimConfig with_level(SimConfig config, Knob knob, int level);

struct SweepRow {
    Knob knob = Knob::Noise;
    int level = 0;
    double baseline_accuracy = 0.0;
    double cdnet_accuracy = 0.0;
    double delta = 0.0;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    std::vector<RunResult> runs;
};

/// For each level and seed: simulate with SimConfig.seed = seed, then compare
/// baseline and pipeline trained with TrainConfig.seed = seed.
SweepResult sweep_levels(Knob knob, std::span<const int> levels, const SimConfig& sim,
                         const TrainConfig& config, std::span<const std::uint64_t> seeds,
                         std::size_t jobs = 1);

// CSV helpers. Numbers are written in shortest round-trip form.
inline constexpr const char* kSweepCsvHeader = "knob,level,baseline_accuracy,cdnet_accuracy,delta";
inline constexpr const char* kRunCsvHeader =
    "dataset,method,seed,accuracy,correct,total,wall_time";

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows);
std::vector<SweepRow> parse_sweep_csv(std::istream& in);
void write_runs_csv(std::ostream& out, std::span<const RunResult> runs);
std::vector<RunResult> parse_runs_csv(std::istream& in);

/// JSON summary of a set of runs (config echoes included).
std::string runs_to_json(std::span<const RunResult> runs);

}  // namespace cdnet
