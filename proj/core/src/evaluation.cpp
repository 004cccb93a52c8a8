// Copyright 2026 The CDNet Authors
// SPDX-License-Identifier: Apache-2.0

#include "cdnet/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

#include "cdnet/error.hpp"
#include "cdnet/pipeline.hpp"
#include "json.hpp"

namespace cdnet {

namespace {

void run_parallel(std::vector<std::function<void()>>& tasks, std::size_t jobs) {
    if (jobs <= 1 || tasks.size() <= 1) {
        for (auto& task : tasks) task();
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(tasks.size());
    auto worker = [&] {
        for (std::size_t i = next.fetch_add(1); i < tasks.size(); i = next.fetch_add(1)) {
            try {
                tasks[i]();
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < std::min(jobs, tasks.size()); ++w) pool.emplace_back(worker);
    pool.clear();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

std::string format_number(double v) {
    char buffer[64];
    const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), v);
    return std::string(buffer, ptr);
}

template <typename T>
T parse_number(const std::string& text, std::size_t line) {
    T value{};
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end || text.empty()) {
        throw DataError("CSV line " + std::to_string(line) + ": cannot parse '" + text + "'");
    }
    return value;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

std::string strip_cr(std::string s) {
    if (!s.empty() && s.back() == '\r') s.pop_back();
    return s;
}

void require_plain(const std::string& s, const char* what) {
    if (s.find_first_of(",\n\r") != std::string::npos) {
        throw DataError(std::string(what) + " '" + s + "' cannot contain commas or newlines");
    }
}

std::string echo(const TrainConfig& config, const std::string& extra) {
    nlohmann::json doc;
    doc["train"] = nlohmann::json::parse(to_json(config));
    if (!extra.empty()) doc["sim"] = nlohmann::json::parse(extra);
    return doc.dump();
}

double mean_accuracy(const std::vector<RunResult>& runs) {
    double total = 0.0;
    for (const auto& r : runs) total += r.accuracy;
    return runs.empty() ? 0.0 : total / static_cast<double>(runs.size());
}

}  // namespace

Accuracy evaluate(const BaseClassifier& classifier, std::span<const LabeledSeries> test) {
    if (test.empty()) {
        throw DataError("cannot evaluate on an empty split");
    }
    Accuracy acc;
    acc.total = test.size();
    for (const auto& s : test) {
        if (predict(classifier, s.values).label == s.label) ++acc.correct;
    }
    return acc;
}


static RunResult run_method(const Dataset& dataset, const TrainConfig& config, std::uint64_t seed,
                            const Method& method, const std::string& extra_echo) {
    TrainConfig seeded = config;
    seeded.seed = seed;
    const auto start = std::chrono::steady_clock::now();
    const auto classifier = method.train(dataset.train, seeded);
    const Accuracy acc = evaluate(*classifier, dataset.test);
    const auto stop = std::chrono::steady_clock::now();
    RunResult r;
    r.dataset_name = dataset.name;
    r.method_name = method.name;
    r.accuracy = acc.value();
    r.correct = acc.correct;
    r.total = acc.total;
    r.seed = seed;
    r.config_echo = echo(seeded, extra_echo);
    r.wall_time = std::chrono::duration<double>(stop - start).count();
    return r;
}

Method baseline_method() {
    return {"baseline", [](std::span<const LabeledSeries> train, const TrainConfig& config) {
                return train_baseline(train, config);
            }};
}

Method cdnet_method() {
    return {"cdnet", [](std::span<const LabeledSeries> train, const TrainConfig& config) {
                return std::move(train_cdnet(train, config).classifier);
            }};
}

Comparison compare_arms(const Dataset& dataset, const TrainConfig& config,
                        std::span<const std::uint64_t> seeds, const Method& first,
                        const Method& second, std::size_t jobs, const std::string& extra_echo) {
    if (seeds.empty()) {
        throw ConfigError("comparison needs at least one seed");
    }
    dataset.validate();
    config.validate();
    Comparison out;
    out.first.resize(seeds.size());
    out.second.resize(seeds.size());
    std::vector<std::function<void()>> tasks;
    for (std::size_t s = 0; s < seeds.size(); ++s) {
        tasks.emplace_back([&, s] { out.first[s] = run_method(dataset, config, seeds[s], first, extra_echo); });
        tasks.emplace_back(
            [&, s] { out.second[s] = run_method(dataset, config, seeds[s], second, extra_echo); });
    }
    run_parallel(tasks, jobs);
    out.mean_first = mean_accuracy(out.first);
    out.mean_second = mean_accuracy(out.second);
    out.delta = out.mean_second - out.mean_first;
    return out;
}

Comparison compare_methods(const Dataset& dataset, const TrainConfig& config,
                           std::span<const std::uint64_t> seeds, std::size_t jobs,
                           const std::string& extra_echo) {
    return compare_arms(dataset, config, seeds, baseline_method(), cdnet_method(), jobs, extra_echo);
}

std::string to_string(Knob knob) {
    switch (knob) {
        case Knob::Noise:
            return "noise";
        case Knob::Similarity:
            return "similarity";
        case Knob::Multimodality:
            return "multimodality";
    }
    return "unknown";
}

Knob knob_from_string(const std::string& name) {
    for (auto k : {Knob::Noise, Knob::Similarity, Knob::Multimodality}) {
        if (to_string(k) == name) return k;
    }
    throw ConfigError("unknown knob '" + name + "' (expected noise, similarity or multimodality)");
}

SimConfig with_level(SimConfig config, Knob knob, int level) {
    switch (knob) {
        case Knob::Noise:
            config.noise_level = level;
            break;
        case Knob::Similarity:
            config.similarity_level = level;
            break;
        case Knob::Multimodality:
            config.multimodality_level = level;
            break;
    }
    return config;
}

SweepResult sweep_levels(Knob knob, std::span<const int> levels, const SimConfig& sim,
                         const TrainConfig& config, std::span<const std::uint64_t> seeds,
                         std::size_t jobs) {
    if (levels.empty()) {
        throw ConfigError("sweep needs at least one level");
    }
    if (seeds.empty()) {
        throw ConfigError("sweep needs at least one seed");
    }
    for (int level : levels) {
        with_level(sim, knob, level).validate();
    }
    config.validate();

    // One task per (level, seed, arm); every task owns its dataset copy.
    struct Slot {
        std::size_t level_index;
        std::size_t seed_index;
        int arm;
        RunResult result;
    };
    std::vector<Slot> slots;
    for (std::size_t l = 0; l < levels.size(); ++l) {
        for (std::size_t s = 0; s < seeds.size(); ++s) {
            for (int arm = 0; arm < 2; ++arm) slots.push_back({l, s, arm, {}});
        }
    }
    std::vector<std::function<void()>> tasks;
    for (auto& slot : slots) {
        tasks.emplace_back([&, &slot = slot] {
            SimConfig level_sim = with_level(sim, knob, levels[slot.level_index]);
            level_sim.seed = seeds[slot.seed_index];
            const Dataset dataset = generate_sim_dataset(level_sim);
            const Method method = slot.arm == 0 ? baseline_method() : cdnet_method();
            slot.result = run_method(dataset, config, seeds[slot.seed_index], method, to_json(level_sim));
        });
    }
    run_parallel(tasks, jobs);

    SweepResult out;
    for (std::size_t l = 0; l < levels.size(); ++l) {
        SweepRow row;
        row.knob = knob;
        row.level = levels[l];
        std::vector<RunResult> base, cd;
        for (const auto& slot : slots) {
            if (slot.level_index != l) continue;
            (slot.arm == 0 ? base : cd).push_back(slot.result);
            out.runs.push_back(slot.result);
        }
        row.baseline_accuracy = mean_accuracy(base);
        row.cdnet_accuracy = mean_accuracy(cd);
        row.delta = row.cdnet_accuracy - row.baseline_accuracy;
        out.rows.push_back(row);
    }
    return out;
}

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows) {
    out << kSweepCsvHeader << '\n';
    for (const auto& r : rows) {
        out << to_string(r.knob) << ',' << r.level << ',' << format_number(r.baseline_accuracy) << ','
            << format_number(r.cdnet_accuracy) << ',' << format_number(r.delta) << '\n';
    }
}

std::vector<SweepRow> parse_sweep_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || strip_cr(line) != kSweepCsvHeader) {
        throw DataError("sweep CSV must start with header '" + std::string(kSweepCsvHeader) + "'");
    }
    std::vector<SweepRow> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty()) continue;
        const auto f = split_csv(line);
        if (f.size() != 5) {
            throw DataError("sweep CSV line " + std::to_string(line_no) + " has " +
                            std::to_string(f.size()) + " fields");
        }
        SweepRow r;
        r.knob = knob_from_string(f[0]);
        r.level = parse_number<int>(f[1], line_no);
        r.baseline_accuracy = parse_number<double>(f[2], line_no);
        r.cdnet_accuracy = parse_number<double>(f[3], line_no);
        r.delta = parse_number<double>(f[4], line_no);
        rows.push_back(r);
    }
    return rows;
}

void write_runs_csv(std::ostream& out, std::span<const RunResult> runs) {
    out << kRunCsvHeader << '\n';
    for (const auto& r : runs) {
        require_plain(r.dataset_name, "dataset name");
        require_plain(r.method_name, "method name");
        out << r.dataset_name << ',' << r.method_name << ',' << r.seed << ','
            << format_number(r.accuracy) << ',' << r.correct << ',' << r.total << ','
            << format_number(r.wall_time) << '\n';
    }
}

std::vector<RunResult> parse_runs_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || strip_cr(line) != kRunCsvHeader) {
        throw DataError("results CSV must start with header '" + std::string(kRunCsvHeader) + "'");
    }
    std::vector<RunResult> runs;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty()) continue;
        const auto f = split_csv(line);
        if (f.size() != 7) {
            throw DataError("results CSV line " + std::to_string(line_no) + " has " +
                            std::to_string(f.size()) + " fields");
        }
        RunResult r;
        r.dataset_name = f[0];
        r.method_name = f[1];
        r.seed = parse_number<std::uint64_t>(f[2], line_no);
        r.accuracy = parse_number<double>(f[3], line_no);
        r.correct = parse_number<std::size_t>(f[4], line_no);
        r.total = parse_number<std::size_t>(f[5], line_no);
        r.wall_time = parse_number<double>(f[6], line_no);
        runs.push_back(std::move(r));
    }
    return runs;
}

std::string runs_to_json(std::span<const RunResult> runs) {
    nlohmann::json doc = nlohmann::json::array();
    for (const auto& r : runs) {
        nlohmann::json entry = {{"dataset", r.dataset_name}, {"method", r.method_name},
                                {"seed", r.seed},            {"accuracy", r.accuracy},
                                {"correct", r.correct},      {"total", r.total},
                                {"wall_time", r.wall_time}};
        if (!r.config_echo.empty()) entry["config"] = nlohmann::json::parse(r.config_echo);
        doc.push_back(std::move(entry));
    }
    return doc.dump(2);
}

}  // namespace cdnet
