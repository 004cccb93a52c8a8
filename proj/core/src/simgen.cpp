// Copyright 2026 The CDNet Authors
// SPDX-License-Identifier: Apache-2.0

#include "cdnet/simgen.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

#include "cdnet/error.hpp"
#include "field_table.hpp"
#include "json.hpp"

namespace cdnet {

namespace {

constexpr std::uint64_t kSimSalt = 0x5147;

using Field = detail::Field<SimConfig>;

const std::vector<Field>& fields() {
    static const std::vector<Field> table = {
        {"noise_level", &SimConfig::noise_level},
        {"similarity_level", &SimConfig::similarity_level},
        {"multimodality_level", &SimConfig::multimodality_level},
        {"n_per_class", &SimConfig::n_per_class},
        {"length", &SimConfig::length},
        {"patterns", &SimConfig::patterns},
        {"seed", &SimConfig::seed},
        {"max_shift", &SimConfig::max_shift},
    };
    return table;
}

void check_level(int level, const char* name) {
    if (level < 0 || level > kMaxLevel) {
        throw ConfigError(std::string(name) + " must be in [0, 5], got " + std::to_string(level));
    }
}

void check_interval(const Interval& i, const std::string& what, const char* knob) {
    if (!(i.lower < i.upper)) {
        throw ConfigError(what + " interval collapsed to (" + std::to_string(i.lower) + ", " +
                          std::to_string(i.upper) + ") after applying " + knob);
    }
}

Interval shift(Interval i, double by) { return {i.lower + by, i.upper + by}; }

Interval shrink(Interval i, double by) {
    const double mid = 0.5 * (i.lower + i.upper);
    const double half = 0.5 * std::max(i.width() - by, kMinIntervalWidth);
    return {mid - half, mid + half};
}

double draw(const Interval& i, Rng& rng) {
    return std::uniform_real_distribution<double>(i.lower, i.upper)(rng);
}

}  // namespace

std::array<ClassIntervals, 2> baseline_intervals() {
    return {ClassIntervals{{1.0, 1.5}, {0.4, 1.2}, {0.0, 0.8}},
            ClassIntervals{{1.1, 1.6}, {0.5, 1.3}, {0.2, 1.0}}};
}

void SimConfig::validate() const {
    check_level(noise_level, "noise_level");
    check_level(similarity_level, "similarity_level");
    check_level(multimodality_level, "multimodality_level");
    if (n_per_class < 2) throw ConfigError("n_per_class must be at least 2");
    if (length < kMinSeriesLength) {
        throw ConfigError("length must be at least " + std::to_string(kMinSeriesLength));
    }
    if (patterns == 0) throw ConfigError("patterns must be positive");
    if (!(max_shift >= 0.0)) throw ConfigError("max_shift must be non-negative");
    for (int c = 0; c < 2; ++c) {
        const auto& b = base[static_cast<std::size_t>(c)];
        const auto label = "class " + std::to_string(c) + " base ";
        check_interval(b.frequency, label + "frequency", "base intervals");
        check_interval(b.amplitude, label + "amplitude", "base intervals");
        check_interval(b.phase, label + "phase", "base intervals");
    }
    (void)class_intervals(*this);
}

std::string to_json(const SimConfig& config) {
    return detail::fields_to_json(config, fields()).dump(2);
}

SimConfig sim_config_from_json(const std::string& text, SimConfig base) {
    detail::fields_from_json(base, fields(), nlohmann::json::parse(text));
    return base;
}

bool set_sim_field(SimConfig& config, const std::string& key, const std::string& value) {
    return detail::set_field(config, fields(), key, value);
}

std::vector<std::string> sim_field_names() { return detail::field_names(fields()); }

double noise_sigma(int noise_level) {
    check_level(noise_level, "noise_level");
    return 0.3 + 0.1 * noise_level;
}

std::array<ClassIntervals, 2> class_intervals(const SimConfig& config) {
    check_level(config.similarity_level, "similarity_level");
    check_level(config.multimodality_level, "multimodality_level");
    const double offset = 0.2 * (kMaxLevel - config.similarity_level);
    const double narrowing = 0.1 * (kMaxLevel - config.multimodality_level);
    std::array<ClassIntervals, 2> out = config.base;
    for (int c = 0; c < 2; ++c) {
        auto& ci = out[static_cast<std::size_t>(c)];
        const double by = c == 0 ? -offset : offset;
        for (Interval* i : {&ci.frequency, &ci.amplitude, &ci.phase}) {
            *i = shrink(shift(*i, by), narrowing);
        }
        const auto label = "class " + std::to_string(c) + " ";
        for (auto [i, name] : {std::pair{&ci.frequency, "frequency"}, std::pair{&ci.amplitude, "amplitude"}}) {
            i->lower = std::max(i->lower, kPositiveFloor);
            check_interval(*i, label + name, "similarity_level");
        }
        check_interval(ci.phase, label + "phase", "multimodality_level");
    }
    return out;
}

std::vector<double> time_grid(std::size_t length) {
    std::vector<double> grid(length, 0.0);
    if (length < 2) return grid;
    for (std::size_t i = 0; i < length; ++i) {
        grid[i] = static_cast<double>(i) / static_cast<double>(length - 1);
    }
    return grid;
}

std::vector<double> base_pattern(const PatternParams& params, std::span<const double> grid) {
    std::vector<double> out(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        out[i] = params.amplitude *
                 std::sin(2.0 * std::numbers::pi * params.frequency * grid[i] + params.phase);
    }
    return out;
}

std::vector<double> combined_pattern(std::span<const PatternParams> patterns,
                                     std::span<const double> weights, double delta, double sigma,
                                     std::span<const double> grid, Rng& rng) {
    if (patterns.size() != weights.size() || patterns.empty()) {
        throw ShapeError("combined_pattern: " + std::to_string(patterns.size()) + " patterns but " +
                         std::to_string(weights.size()) + " weights");
    }
    double total = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw ConfigError("combined_pattern: weights must be non-negative");
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw ConfigError("combined_pattern: weights sum to " + std::to_string(total) + ", not 1");
    }
    if (sigma < 0.0) throw ConfigError("combined_pattern: sigma must be non-negative");
    std::vector<double> shifted(grid.begin(), grid.end());
    for (auto& t : shifted) t -= delta;
    std::vector<double> out(grid.size(), 0.0);
    for (std::size_t j = 0; j < patterns.size(); ++j) {
        const auto p = base_pattern(patterns[j], shifted);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += weights[j] * p[i];
    }
    const auto noise = normal_vector(out.size(), sigma, rng);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += noise[i];
    return out;
}

Dataset generate_sim_dataset(const SimConfig& config, std::vector<SimRecord>* records) {
    config.validate();
    const auto intervals = class_intervals(config);
    const double sigma = noise_sigma(config.noise_level);
    const auto grid = time_grid(config.length);
    const std::size_t n_train = (config.n_per_class + 1) / 2;

    Dataset dataset;
    dataset.name = "sim_noise" + std::to_string(config.noise_level) + "_sim" +
                   std::to_string(config.similarity_level) + "_mm" +
                   std::to_string(config.multimodality_level) + "_seed" +
                   std::to_string(config.seed);
    dataset.label_map = LabelMap::from_labels({"0", "1"});
    std::vector<SimRecord> train_records, test_records;

    for (int label = 0; label < 2; ++label) {
        const auto& ci = intervals[static_cast<std::size_t>(label)];
        for (std::size_t n = 0; n < config.n_per_class; ++n) {
            Rng rng = derive_rng(config.seed,
                                 static_cast<std::uint64_t>(label) * config.n_per_class + n, kSimSalt);
            SimRecord rec;
            rec.label = label;
            rec.train = n < n_train;
            for (std::size_t j = 0; j < config.patterns; ++j) {
                PatternParams p;
                p.frequency = draw(ci.frequency, rng);
                p.amplitude = draw(ci.amplitude, rng);
                p.phase = draw(ci.phase, rng);
                rec.patterns.push_back(p);
            }
            rec.weights = dirichlet_ones(config.patterns, rng);
            rec.delta = config.max_shift > 0.0
                            ? std::uniform_real_distribution<double>(0.0, config.max_shift)(rng)
                            : 0.0;
            LabeledSeries s;
            s.label = label;
            s.values = combined_pattern(rec.patterns, rec.weights, rec.delta, sigma, grid, rng);
            s.source_id = dataset.name + ":" + std::to_string(label) + ":" + std::to_string(n);
            (rec.train ? dataset.train : dataset.test).push_back(std::move(s));
            (rec.train ? train_records : test_records).push_back(std::move(rec));
        }
    }
    if (records) {
        *records = std::move(train_records);
        records->insert(records->end(), test_records.begin(), test_records.end());
    }
    return dataset;
}

}  // namespace cdnet
