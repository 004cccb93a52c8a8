// Copyright 2026 The CDNet Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "json.hpp"

#include "cdnet/error.hpp"
#include "cdnet/evaluation.hpp"
#include "cdnet/ranking.hpp"

using namespace cdnet;

namespace {

/// Predicts label 1 exactly when the first value is positive.
class SignClassifier final : public BaseClassifier {
public:
    explicit SignClassifier(std::size_t length, double gain = 1.0) : length_(length) {
        std::vector<double> w(2 * length, 0.0);
        w[length] = gain;
        weights_ = Tensor(std::move(w), {2, length});
        bias_ = Tensor::zeros({2});
    }
    std::string architecture() const override { return "sign"; }
    std::size_t input_length() const override { return length_; }
    std::size_t embedding_size() const override { return length_; }
    Tensor embed(Tape&, const Tensor& series) const override { return series; }
    Tensor head(Tape& tape, const Tensor& e) const override { return dense(tape, e, weights_, bias_); }
    std::vector<NamedParameter> body_parameters() const override { return {}; }
    std::vector<NamedParameter> head_parameters() const override {
        return {{"w", weights_}, {"b", bias_}};
    }
    std::unique_ptr<BaseClassifier> clone() const override {
        return std::make_unique<SignClassifier>(*this);
    }

private:
    std::size_t length_;
    Tensor weights_, bias_;
};

LabeledSeries point(double first, int label) {
    std::vector<double> v(8, 0.0);
    v[0] = first;
    return {v, label, {}};
}

Dataset sign_dataset() {
    Dataset d;
    d.name = "signs";
    d.label_map = LabelMap::from_labels({"0", "1"});
    d.train = {point(1, 1), point(-1, 0), point(2, 1), point(-2, 0)};
    d.test = {point(1, 1), point(-1, 0), point(3, 1), point(2, 0)};
    return d;
}

Method sign_method(const std::string& name) {
    return {name, [](std::span<const LabeledSeries>, const TrainConfig&) {
                return std::make_unique<SignClassifier>(8);
            }};
}

AccuracyMatrix matrix(std::vector<std::vector<double>> acc) {
    AccuracyMatrix m;
    for (std::size_t i = 0; i < acc.size(); ++i) m.methods.push_back("m" + std::to_string(i));
    for (std::size_t j = 0; j < acc.front().size(); ++j) m.datasets.push_back("d" + std::to_string(j));
    m.accuracy = std::move(acc);
    return m;
}

}  // namespace

TEST_CASE("accuracy examples") {
    const SignClassifier sign(8);
    const std::vector<LabeledSeries> perfect{point(1, 1), point(-1, 0)};
    CHECK(evaluate(sign, perfect).value() == 1.0);

    const SignClassifier constant(8, 0.0);  // equal logits: always label 0
    const std::vector<LabeledSeries> balanced{point(1, 1), point(-1, 0), point(2, 1), point(-2, 0)};
    CHECK(evaluate(constant, balanced).value() == 0.5);

    const auto acc = evaluate(sign, sign_dataset().test);
    CHECK(acc.correct == 3);
    CHECK(acc.total == 4);
    CHECK(acc.value() == 0.75);

    CHECK_THROWS_AS(evaluate(sign, std::vector<LabeledSeries>{}), DataError);
    CHECK_THROWS_AS(evaluate(sign, std::vector<LabeledSeries>{{std::vector<double>(9, 0.0), 0, {}}}),
                    ShapeError);
}

TEST_CASE("a method compared with itself has zero improvement") {
    const auto d = sign_dataset();
    const std::vector<std::uint64_t> seeds{4};
    const auto c = compare_arms(d, TrainConfig{}, seeds, sign_method("a"), sign_method("b"));
    CHECK(c.delta == 0.0);
    REQUIRE(c.first.size() == 1);
    CHECK(c.first[0].accuracy == 0.75);
    CHECK(c.first[0].correct == 3);
    CHECK(c.first[0].seed == 4);
    CHECK(c.first[0].config_echo == c.second[0].config_echo);
    const auto echo = nlohmann::json::parse(c.first[0].config_echo);
    CHECK(echo["train"]["seed"] == 4);
    CHECK_THROWS_AS(compare_arms(d, TrainConfig{}, std::vector<std::uint64_t>{}, sign_method("a"),
                                 sign_method("b")),
                    ConfigError);
}

TEST_CASE("both arms see the same splits and seeds") {
    SimConfig sim;
    sim.n_per_class = 6;
    sim.length = 16;
    const auto d = generate_sim_dataset(sim);
    TrainConfig cfg;
    cfg.epochs_pretrain = 2;
    cfg.epochs_finetune = 2;
    cfg.epochs_chain = 2;
    cfg.batch_size = 4;
    cfg.steps = 2;
    const std::vector<std::uint64_t> seeds{0, 1};
    const auto c = compare_methods(d, cfg, seeds, 2, to_json(sim));
    REQUIRE(c.first.size() == 2);
    REQUIRE(c.second.size() == 2);
    for (std::size_t s = 0; s < 2; ++s) {
        CHECK(c.first[s].method_name == "baseline");
        CHECK(c.second[s].method_name == "cdnet");
        CHECK(c.first[s].seed == seeds[s]);
        CHECK(c.first[s].config_echo == c.second[s].config_echo);
        CHECK(c.first[s].dataset_name == c.second[s].dataset_name);
        CHECK(c.first[s].total == d.test.size());
        CHECK(c.first[s].accuracy ==
              static_cast<double>(c.first[s].correct) / static_cast<double>(c.first[s].total));
        const auto echo = nlohmann::json::parse(c.first[s].config_echo);
        CHECK(echo["sim"]["n_per_class"] == 6);
    }
    CHECK(c.delta == doctest::Approx(c.mean_second - c.mean_first));
}

TEST_CASE("sweep emits one row per level and rejects empty level lists") {
    SimConfig sim;
    sim.n_per_class = 4;
    sim.length = 16;
    TrainConfig cfg;
    cfg.epochs_pretrain = 1;
    cfg.epochs_finetune = 1;
    cfg.epochs_chain = 1;
    cfg.batch_size = 2;
    cfg.steps = 1;
    const std::vector<std::uint64_t> seeds{0};
    const std::vector<int> levels{0, 3};
    const auto r = sweep_levels(Knob::Noise, levels, sim, cfg, seeds);
    REQUIRE(r.rows.size() == 2);
    CHECK(r.rows[0].level == 0);
    CHECK(r.rows[1].level == 3);
    CHECK(r.runs.size() == 4);
    CHECK(r.rows[1].delta == doctest::Approx(r.rows[1].cdnet_accuracy - r.rows[1].baseline_accuracy));
    CHECK_THROWS_AS(sweep_levels(Knob::Noise, std::vector<int>{}, sim, cfg, seeds), ConfigError);
    CHECK_THROWS_AS(sweep_levels(Knob::Noise, std::vector<int>{6}, sim, cfg, seeds), ConfigError);
}

TEST_CASE("knob names") {
    for (auto k : {Knob::Noise, Knob::Similarity, Knob::Multimodality}) {
        CHECK(knob_from_string(to_string(k)) == k);
    }
    CHECK_THROWS_AS(knob_from_string("loudness"), ConfigError);
    SimConfig s;
    CHECK(with_level(s, Knob::Similarity, 1).similarity_level == 1);
    CHECK(with_level(s, Knob::Multimodality, 2).multimodality_level == 2);
    CHECK(with_level(s, Knob::Noise, 4).noise_level == 4);
}

TEST_CASE("CSV rows round-trip through their parsers") {
    std::vector<SweepRow> rows{{Knob::Noise, 0, 0.9, 0.95, 0.95 - 0.9},
                               {Knob::Multimodality, 4, 1.0 / 3.0, 0.1 + 0.2, 0.1 + 0.2 - 1.0 / 3.0}};
    std::stringstream sweep;
    write_sweep_csv(sweep, rows);
    const auto back = parse_sweep_csv(sweep);
    REQUIRE(back.size() == rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(back[i].knob == rows[i].knob);
        CHECK(back[i].level == rows[i].level);
        CHECK(back[i].baseline_accuracy == rows[i].baseline_accuracy);
        CHECK(back[i].cdnet_accuracy == rows[i].cdnet_accuracy);
        CHECK(back[i].delta == rows[i].delta);
    }

    std::vector<RunResult> runs(2);
    runs[0] = {"ds", "baseline", 0.7, 7, 10, 18446744073709551615ULL, "", 1.2345678901234567};
    runs[1] = {"ds", "cdnet", 2.0 / 3.0, 2, 3, 1, "", 0.1};
    std::stringstream csv;
    write_runs_csv(csv, runs);
    const auto parsed = parse_runs_csv(csv);
    REQUIRE(parsed.size() == 2);
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(parsed[i].dataset_name == runs[i].dataset_name);
        CHECK(parsed[i].method_name == runs[i].method_name);
        CHECK(parsed[i].accuracy == runs[i].accuracy);
        CHECK(parsed[i].correct == runs[i].correct);
        CHECK(parsed[i].total == runs[i].total);
        CHECK(parsed[i].seed == runs[i].seed);
        CHECK(parsed[i].wall_time == runs[i].wall_time);
    }
    std::stringstream bad("dataset,method\n");
    CHECK_THROWS_AS(parse_runs_csv(bad), DataError);
    std::stringstream short_row(std::string(kRunCsvHeader) + "\nds,m,1\n");
    CHECK_THROWS_AS(parse_runs_csv(short_row), DataError);
    runs[0].dataset_name = "a,b";
    std::stringstream sink;
    CHECK_THROWS_AS(write_runs_csv(sink, runs), DataError);
    CHECK(nlohmann::json::parse(runs_to_json(parsed)).size() == 2);
}

TEST_CASE("ranking with a clear winner") {
    const auto t = rank_methods(matrix({{0.9, 0.8, 0.7, 0.95}, {0.5, 0.6, 0.6, 0.9}}));
    CHECK(t.mean_ranks == std::vector<double>{1.0, 2.0});
    CHECK(t.friedman_statistic == doctest::Approx(4.0));
}

TEST_CASE("tied methods share the average rank") {
    const auto t = rank_methods(matrix({{0.9, 0.8}, {0.9, 0.7}}));
    CHECK(t.ranks[0] == std::vector<double>{1.5, 1.5});
    CHECK(t.ranks[1] == std::vector<double>{1.0, 2.0});
    const std::vector<double> v{0.5, 0.7, 0.5, 0.7, 0.1};
    CHECK(descending_ranks(v) == std::vector<double>{3.5, 1.5, 3.5, 1.5, 5.0});
}

TEST_CASE("hand-built three-by-four matrix") {
    // Ranks per dataset: (1,2,3), (1.5,1.5,3), (2,1,3), (2,3,1).
    // Mean ranks 1.625, 1.875, 2.5; sum of squares 12.40625;
    // chi2 = 12*4/(3*4) * (12.40625 - 3*16/4) = 1.625.
    const auto t = rank_methods(matrix({{0.90, 0.80, 0.70, 0.85},
                                        {0.85, 0.80, 0.75, 0.80},
                                        {0.80, 0.70, 0.60, 0.90}}));
    const std::vector<std::vector<double>> expected{{1, 2, 3}, {1.5, 1.5, 3}, {2, 1, 3}, {2, 3, 1}};
    CHECK(t.ranks == expected);
    CHECK(t.mean_ranks == std::vector<double>{1.625, 1.875, 2.5});
    CHECK(std::abs(t.friedman_statistic - 1.625) < 1e-9);
    CHECK(std::abs(t.nemenyi_cd - 2.343 * std::sqrt(0.5)) < 1e-12);
}

TEST_CASE("rank sums equal k(k+1)/2 on every dataset") {
    Rng rng = derive_rng(8, 8);
    std::uniform_int_distribution<int> coarse(0, 4);  // coarse values force ties
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t k = 2 + static_cast<std::size_t>(trial % 9);
        std::vector<std::vector<double>> acc(k, std::vector<double>(5));
        for (auto& row : acc) for (auto& v : row) v = coarse(rng) / 4.0;
        const auto t = rank_methods(matrix(acc));
        for (const auto& r : t.ranks) {
            double s = 0.0;
            for (double x : r) s += x;
            CHECK(s == static_cast<double>(k * (k + 1)) / 2.0);
        }
    }
}

TEST_CASE("ranking input validation") {
    CHECK_THROWS_AS(rank_methods(matrix({{0.9, 0.8}})), ConfigError);
    CHECK_THROWS_AS(rank_methods(matrix({{0.9}, {0.8}})), ConfigError);
    auto m = matrix({{0.9, 0.8}, {0.7, 0.6}});
    m.accuracy[1].pop_back();
    CHECK_THROWS_AS(rank_methods(m), DataError);
    CHECK(nemenyi_q05(2) == 1.960);
    CHECK(nemenyi_q05(10) == 3.164);
    CHECK_THROWS_AS(nemenyi_q05(11), ConfigError);
}

TEST_CASE("accuracy matrix averages runs and rejects gaps") {
    std::vector<RunResult> runs;
    auto add = [&](std::string d, std::string m, double a) {
        RunResult r;
        r.dataset_name = std::move(d);
        r.method_name = std::move(m);
        r.accuracy = a;
        runs.push_back(r);
    };
    add("y", "cdnet", 0.8);
    add("x", "baseline", 0.6);
    add("x", "baseline", 0.8);
    add("x", "cdnet", 0.9);
    add("y", "baseline", 0.5);
    const auto m = accuracy_matrix(runs);
    CHECK(m.methods == std::vector<std::string>{"baseline", "cdnet"});
    CHECK(m.datasets == std::vector<std::string>{"x", "y"});
    CHECK(m.accuracy[0][0] == doctest::Approx(0.7));
    CHECK(m.accuracy[1][1] == 0.8);
    add("z", "cdnet", 0.3);
    CHECK_THROWS_AS(accuracy_matrix(runs), DataError);
    const auto json = nlohmann::json::parse(rank_table_json(rank_methods(m)));
    CHECK(json["mean_ranks"].size() == 2);
}
