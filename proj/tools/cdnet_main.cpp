// Copyright 2026 The CDNet Authors
// SPDX-License-Identifier: Apache-2.0

// cdnet: command-line driver. Every subcommand reads its settings from
// defaults, then an optional flat JSON file (--config), then --key value
// flags, and writes its outputs into a run directory.

#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "cdnet/checkpoint.hpp"
#include "cdnet/dataio.hpp"
#include "cdnet/error.hpp"
#include "cdnet/evaluation.hpp"
#include "cdnet/pipeline.hpp"
#include "cdnet/ranking.hpp"
#include "cdnet/simgen.hpp"
#include "cdnet/train_config.hpp"

namespace fs = std::filesystem;
using namespace cdnet;

namespace {

constexpr const char* kRunDirEnv = "CDNET_RUN_DIR";

struct Options {
    std::string config_path;
    std::string run_dir;
    std::size_t jobs = 1;
    std::string data_dir;
    std::string dataset;
    bool normalize = true;
    std::string checkpoint;
    std::string seeds = "0,1,2";
    std::string knob = "noise";
    std::string levels = "0,2,4";
    std::vector<std::string> results;
    std::map<std::string, std::string> fields;
};

struct Settings {
    TrainConfig train;
    SimConfig sim;
};

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path.string() + "'");
    out << text;
}

Settings resolve(const Options& opts) {
    Settings s;
    if (!opts.config_path.empty()) {
        const std::string text = read_file(opts.config_path);
        s.train = train_config_from_json(text);
        s.sim = sim_config_from_json(text);
    }
    for (const auto& [key, value] : opts.fields) {
        const bool a = set_train_field(s.train, key, value);
        const bool b = set_sim_field(s.sim, key, value);
        if (!a && !b) throw ConfigError("unknown setting '" + key + "'");
    }
    s.train.validate();
    s.sim.validate();
    return s;
}

fs::path prepare_run_dir(const Options& opts, const Settings& s) {
    const fs::path dir = opts.run_dir;
    fs::create_directories(dir);
    nlohmann::json echo;
    echo["train"] = nlohmann::json::parse(to_json(s.train));
    echo["sim"] = nlohmann::json::parse(to_json(s.sim));
    if (!opts.data_dir.empty()) {
        echo["data_dir"] = opts.data_dir;
        echo["dataset"] = opts.dataset;
        echo["normalize"] = opts.normalize;
    }
    write_file(dir / "config.json", echo.dump(2) + "\n");
    return dir;
}

/// UCR files when --data is given, otherwise a simulated dataset.
Dataset load_data(const Options& opts, const Settings& s) {
    if (opts.data_dir.empty()) return generate_sim_dataset(s.sim);
    if (opts.dataset.empty()) throw ConfigError("--data needs --dataset");
    return load_dataset(opts.data_dir, opts.dataset, opts.normalize);
}

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
    std::vector<std::uint64_t> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(std::stoull(item));
    }
    if (out.empty()) throw ConfigError("--seeds is empty");
    return out;
}

std::vector<int> parse_levels(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(std::stoi(item));
    }
    return out;
}

fs::path checkpoint_or(const Options& opts, const fs::path& dir, const char* fallback) {
    return opts.checkpoint.empty() ? dir / fallback : fs::path(opts.checkpoint);
}

void write_loss_log(const fs::path& path, const std::vector<LossReport>& log) {
    std::ofstream out(path);
    out << "epoch,l_ce,l_snn,l_triplet,sigma_ce,sigma_snn,sigma_triplet,l_total\n";
    out.precision(17);
    for (const auto& r : log) {
        out << r.epoch << ',' << r.l_ce << ',' << r.l_snn << ',' << r.l_triplet << ','
            << r.sigmas[0] << ',' << r.sigmas[1] << ',' << r.sigmas[2] << ',' << r.l_total << '\n';
    }
}

void write_runs(const fs::path& dir, const std::vector<RunResult>& runs) {
    std::ofstream csv(dir / "results.csv");
    write_runs_csv(csv, runs);
}

// ---------------------------------------------------------------------------

int cmd_simulate(const Options& opts) {
    const Settings s = resolve(opts);
    const fs::path dir = prepare_run_dir(opts, s);
    const Dataset data = generate_sim_dataset(s.sim);
    const fs::path out = dir / "data";
    fs::create_directories(out);
    save_dataset(data, out);
    std::cout << "wrote " << train_file(out, data.name).string() << " and its TEST split ("
              << data.train.size() << " + " << data.test.size() << " series)\n";
    return 0;
}

int cmd_train_chains(const Options& opts) {
    const Settings s = resolve(opts);
    const fs::path dir = prepare_run_dir(opts, s);
    const Dataset data = load_data(opts, s);
    std::array<ChainTrainingHistory, 4> histories;
    Checkpoint cp;
    cp.stage = "chains";
    cp.config = s.train;
    cp.chains = train_chains_stage(data.train, s.train, opts.jobs, &histories);
    save_checkpoint(cp, dir / "chains.json");

    std::ofstream csv(dir / "chain_validation.csv");
    csv << "chain,epoch,step,validation_mse\n";
    csv.precision(17);
    for (std::size_t c = 0; c < 4; ++c) {
        const auto& h = histories[c];
        for (std::size_t k = 0; k < h.epochs.size(); ++k) {
            for (std::size_t t = 0; t < h.validation_mse[k].size(); ++t) {
                csv << to_string(kAllChainKinds[c]) << ',' << h.epochs[k] << ',' << t + 1 << ','
                    << h.validation_mse[k][t] << '\n';
            }
        }
    }
    std::cout << "wrote " << (dir / "chains.json").string() << '\n';
    return 0;
}

int cmd_pretrain(const Options& opts) {
    const Settings s = resolve(opts);
    const fs::path dir = prepare_run_dir(opts, s);
    const Dataset data = load_data(opts, s);
    Checkpoint chains = load_checkpoint(checkpoint_or(opts, dir, "chains.json"));
    if (!chains.chains) throw ConfigError("checkpoint holds no reverse chains");
    CdnetModel model = pretrain_stage(data.train, s.train, std::move(*chains.chains));
    write_loss_log(dir / "pretrain_log.csv", model.pretrain_log);
    Checkpoint cp;
    cp.stage = "pretrain";
    cp.config = s.train;
    cp.classifier = std::move(model.classifier);
    cp.weights = std::move(model.weights);
    cp.chains = std::move(model.chains);
    save_checkpoint(cp, dir / "pretrain.json");
    std::cout << "wrote " << (dir / "pretrain.json").string() << '\n';
    return 0;
}

int cmd_finetune(const Options& opts) {
    const Settings s = resolve(opts);
    const fs::path dir = prepare_run_dir(opts, s);
    const Dataset data = load_data(opts, s);
    Checkpoint cp = load_checkpoint(checkpoint_or(opts, dir, "pretrain.json"));
    if (!cp.classifier) throw ConfigError("checkpoint holds no classifier");
    finetune(*cp.classifier, data.train, s.train);
    cp.stage = "finetune";
    cp.config = s.train;
    save_checkpoint(cp, dir / "model.json");
    std::cout << "wrote " << (dir / "model.json").string() << '\n';
    return 0;
}

int cmd_evaluate(const Options& opts) {
    const Settings s = resolve(opts);
    const fs::path dir = prepare_run_dir(opts, s);
    const Dataset data = load_data(opts, s);
    const Checkpoint cp = load_checkpoint(checkpoint_or(opts, dir, "model.json"));
    if (!cp.classifier) throw ConfigError("checkpoint holds no classifier");
    const Accuracy acc = evaluate(*cp.classifier, data.test);
    RunResult r;
    r.dataset_name = data.name;
    r.method_name = "cdnet";
    r.accuracy = acc.value();
    r.correct = acc.correct;
    r.total = acc.total;
    r.seed = cp.config.seed;
    r.config_echo = to_json(cp.config);
    const std::vector<RunResult> runs{r};
    write_runs(dir, runs);
    write_file(dir / "summary.json", runs_to_json(runs) + "\n");
    std::cout << "accuracy " << r.accuracy << " (" << r.correct << "/" << r.total << ")\n";
    return 0;
}

int cmd_compare(const Options& opts) {
    const Settings s = resolve(opts);
    const fs::path dir = prepare_run_dir(opts, s);
    const Dataset data = load_data(opts, s);
    const auto seeds = parse_seeds(opts.seeds);
    const std::string echo = opts.data_dir.empty() ? to_json(s.sim) : std::string{};
    const Comparison c = compare_methods(data, s.train, seeds, opts.jobs, echo);

    std::vector<RunResult> runs = c.first;
    runs.insert(runs.end(), c.second.begin(), c.second.end());
    write_runs(dir, runs);
    nlohmann::json summary;
    summary["dataset"] = data.name;
    summary["seeds"] = seeds;
    summary["baseline_mean_accuracy"] = c.mean_first;
    summary["cdnet_mean_accuracy"] = c.mean_second;
    summary["delta"] = c.delta;
    summary["runs"] = nlohmann::json::parse(runs_to_json(runs));
    write_file(dir / "summary.json", summary.dump(2) + "\n");
    std::cout << data.name << ": baseline " << c.mean_first << ", cdnet " << c.mean_second
              << ", delta " << c.delta << '\n';
    return 0;
}

int cmd_sweep(const Options& opts) {
    const Settings s = resolve(opts);
    const fs::path dir = prepare_run_dir(opts, s);
    const Knob knob = knob_from_string(opts.knob);
    const auto levels = parse_levels(opts.levels);
    const auto seeds = parse_seeds(opts.seeds);
    const SweepResult result = sweep_levels(knob, levels, s.sim, s.train, seeds, opts.jobs);

    {
        std::ofstream csv(dir / "sweep.csv");
        write_sweep_csv(csv, result.rows);
    }
    write_runs(dir, result.runs);
    nlohmann::json summary;
    summary["knob"] = to_string(knob);
    summary["levels"] = levels;
    summary["seeds"] = seeds;
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : result.rows) {
        rows.push_back({{"level", r.level},
                        {"baseline_accuracy", r.baseline_accuracy},
                        {"cdnet_accuracy", r.cdnet_accuracy},
                        {"delta", r.delta}});
        std::cout << to_string(knob) << ' ' << r.level << ": baseline " << r.baseline_accuracy
                  << ", cdnet " << r.cdnet_accuracy << ", delta " << r.delta << '\n';
    }
    summary["rows"] = rows;
    summary["runs"] = nlohmann::json::parse(runs_to_json(result.runs));
    write_file(dir / "summary.json", summary.dump(2) + "\n");
    return 0;
}

int cmd_rank(const Options& opts) {
    if (opts.results.empty()) throw ConfigError("rank needs at least one --results file");
    std::vector<RunResult> runs;
    for (const auto& path : opts.results) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open '" + path + "'");
        auto part = parse_runs_csv(in);
        runs.insert(runs.end(), part.begin(), part.end());
    }
    const RankTable table = rank_methods(accuracy_matrix(runs));
    const fs::path dir = opts.run_dir;
    fs::create_directories(dir);
    write_file(dir / "rank_table.json", rank_table_json(table) + "\n");
    std::ofstream csv(dir / "ranks.csv");
    csv << "dataset,method,rank\n";
    for (std::size_t d = 0; d < table.datasets.size(); ++d) {
        for (std::size_t m = 0; m < table.methods.size(); ++m) {
            csv << table.datasets[d] << ',' << table.methods[m] << ',' << table.ranks[d][m] << '\n';
        }
    }
    for (std::size_t m = 0; m < table.methods.size(); ++m) {
        std::cout << table.methods[m] << " mean rank " << table.mean_ranks[m] << '\n';
    }
    std::cout << "Friedman " << table.friedman_statistic << ", CD " << table.nemenyi_cd << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Contrastive diffusion augmentation for binary time-series classification"};
    app.require_subcommand(1);
    app.fallthrough();

    Options opts;
    const char* env_dir = std::getenv(kRunDirEnv);
    opts.run_dir = env_dir && *env_dir ? env_dir : "runs/default";

    app.add_option("--config", opts.config_path, "Flat JSON file with TrainConfig/SimConfig keys");
    app.add_option("--run-dir", opts.run_dir,
                   std::string("Output directory (default from ") + kRunDirEnv + ")");
    app.add_option("--jobs", opts.jobs, "Parallel jobs for chains, seeds and sweep levels")
        ->check(CLI::PositiveNumber);
    app.add_option("--data", opts.data_dir, "Directory of UCR-format <name>_TRAIN/_TEST files");
    app.add_option("--dataset", opts.dataset, "Dataset name inside --data");
    app.add_flag("--normalize,!--no-normalize", opts.normalize,
                 "z-normalize each loaded series (on by default)");
    app.add_option("--checkpoint", opts.checkpoint, "Checkpoint to read");

    std::vector<std::string> names = train_field_names();
    for (const auto& n : sim_field_names()) {
        if (std::find(names.begin(), names.end(), n) == names.end()) names.push_back(n);
    }
    for (const auto& n : names) {
        app.add_option_function<std::string>(
            "--" + n, [&opts, n](const std::string& v) { opts.fields[n] = v; },
            n == "seed" ? "Training and simulation seed" : "Config field " + n);
    }

    auto* simulate = app.add_subcommand("simulate", "Generate a simulated dataset");
    auto* chains = app.add_subcommand("train-chains", "Train the four reverse chains");
    auto* pre = app.add_subcommand("pretrain", "Pretrain the classifier on contrastive sets");
    auto* fine = app.add_subcommand("finetune", "Retrain the classifier head");
    auto* eval = app.add_subcommand("evaluate", "Test accuracy of a fine-tuned checkpoint");
    auto* compare = app.add_subcommand("compare", "Baseline against the full pipeline");
    compare->add_option("--seeds", opts.seeds, "Comma-separated training seeds");
    auto* sweep = app.add_subcommand("sweep", "Compare across levels of one simulation knob");
    sweep->add_option("--seeds", opts.seeds, "Comma-separated seeds");
    sweep->add_option("--knob", opts.knob, "noise, similarity or multimodality");
    sweep->add_option("--levels", opts.levels, "Comma-separated levels in [0, 5]");
    auto* rank = app.add_subcommand("rank", "Average ranks, Friedman statistic and Nemenyi CD");
    rank->add_option("--results", opts.results, "results.csv files to merge")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*simulate) return cmd_simulate(opts);
        if (*chains) return cmd_train_chains(opts);
        if (*pre) return cmd_pretrain(opts);
        if (*fine) return cmd_finetune(opts);
        if (*eval) return cmd_evaluate(opts);
        if (*compare) return cmd_compare(opts);
        if (*sweep) return cmd_sweep(opts);
        if (*rank) return cmd_rank(opts);
    } catch (const std::exception& e) {
        std::cerr << "cdnet: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
