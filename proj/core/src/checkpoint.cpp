// Copyright 2026 The CDNet Authors
// SPDX-License-Identifier: Apache-2.0

#include "cdnet/checkpoint.hpp"

#include <fstream>
#include <sstream>

#include "cdnet/error.hpp"
#include "json.hpp"

namespace cdnet {

namespace {

using nlohmann::json;

json tensor_json(const std::string& name, const Tensor& t) {
    return json{{"name", name},
                {"shape", t.shape()},
                {"values", std::vector<double>(t.values().begin(), t.values().end())}};
}

void restore_tensor(Tensor target, const json& entry, const std::string& context) {
    const auto shape = entry.at("shape").get<Shape>();
    if (shape != target.shape()) {
        throw DataError(context + ": parameter '" + entry.at("name").get<std::string>() +
                        "' has shape " + shape_string(shape) + ", expected " +
                        shape_string(target.shape()));
    }
    const auto values = entry.at("values").get<std::vector<double>>();
    if (values.size() != target.size()) {
        throw DataError(context + ": parameter value count mismatch");
    }
    std::copy(values.begin(), values.end(), target.mutable_values().begin());
}

template <typename Named>
void restore_named(const Named& named, const json& entries, const std::string& context) {
    if (entries.size() != named.size()) {
        throw DataError(context + ": expected " + std::to_string(named.size()) +
                        " parameters, found " + std::to_string(entries.size()));
    }
    for (std::size_t i = 0; i < named.size(); ++i) {
        const auto& [name, tensor] = named[i];
        if (entries[i].at("name").get<std::string>() != name) {
            throw DataError(context + ": expected parameter '" + name + "', found '" +
                            entries[i].at("name").get<std::string>() + "'");
        }
        restore_tensor(tensor, entries[i], context);
    }
}

}  // namespace

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path) {
    json doc;
    doc["format"] = kCheckpointFormat;
    doc["version"] = kCheckpointVersion;
    doc["stage"] = checkpoint.stage;
    doc["config"] = json::parse(to_json(checkpoint.config));
    if (checkpoint.classifier) {
        const auto& c = *checkpoint.classifier;
        json params = json::array();
        for (const auto& p : c.named_parameters()) params.push_back(tensor_json(p.name, p.tensor));
        doc["classifier"] = {{"architecture", c.architecture()},
                             {"input_length", c.input_length()},
                             {"embedding_size", c.embedding_size()},
                             {"body_frozen", c.body_frozen()},
                             {"parameters", std::move(params)}};
    }
    if (checkpoint.weights) {
        doc["uncertainty"] = {{"log_sigma_ce", checkpoint.weights->log_sigma_ce.item()},
                              {"log_sigma_snn", checkpoint.weights->log_sigma_snn.item()},
                              {"log_sigma_triplet", checkpoint.weights->log_sigma_triplet.item()}};
    }
    if (checkpoint.chains) {
        const auto& chains = *checkpoint.chains;
        const auto& first = chains.chains[0].denoisers.at(0);
        json list = json::array();
        for (auto kind : kAllChainKinds) {
            json denoisers = json::array();
            for (const auto& d : chains[kind].denoisers) {
                json params = json::array();
                for (const auto& [name, t] : d.named_parameters()) params.push_back(tensor_json(name, t));
                denoisers.push_back({{"step", d.step()}, {"parameters", std::move(params)}});
            }
            list.push_back({{"kind", to_string(kind)}, {"denoisers", std::move(denoisers)}});
        }
        doc["chains"] = {{"length", first.length()},
                         {"steps", chains.steps()},
                         {"channels", first.shape().channels},
                         {"kernel", first.shape().kernel},
                         {"chains", std::move(list)}};
    }
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw DataError("cannot write checkpoint " + path.string());
    }
    out << doc.dump() << '\n';
    if (!out) {
        throw DataError("write failed for checkpoint " + path.string());
    }
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open checkpoint " + path.string());
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw DataError("checkpoint " + path.string() + " is not valid JSON: " + e.what());
    }
    const std::string context = "checkpoint " + path.string();
    try {
        if (doc.value("format", "") != kCheckpointFormat) {
            throw DataError(context + ": not a cdnet checkpoint");
        }
        if (doc.at("version").get<int>() != kCheckpointVersion) {
            throw DataError(context + ": unsupported version " + doc.at("version").dump());
        }
        Checkpoint cp;
        cp.stage = doc.value("stage", "");
        cp.config = train_config_from_json(doc.at("config").dump());
        if (doc.contains("classifier")) {
            const auto& c = doc["classifier"];
            if (c.at("architecture").get<std::string>() != "small_cnn") {
                throw DataError(context + ": unknown architecture '" +
                                c.at("architecture").get<std::string>() + "'");
            }
            cp.classifier = build_small_cnn(c.at("input_length").get<std::size_t>(),
                                            c.at("embedding_size").get<std::size_t>(), 0);
            std::vector<std::pair<std::string, Tensor>> named;
            for (const auto& p : cp.classifier->named_parameters()) named.emplace_back(p.name, p.tensor);
            restore_named(named, c.at("parameters"), context);
            if (c.value("body_frozen", false)) cp.classifier->freeze_body();
        }
        if (doc.contains("uncertainty")) {
            const auto& u = doc["uncertainty"];
            UncertaintyWeights w;
            w.log_sigma_ce.mutable_values()[0] = u.at("log_sigma_ce").get<double>();
            w.log_sigma_snn.mutable_values()[0] = u.at("log_sigma_snn").get<double>();
            w.log_sigma_triplet.mutable_values()[0] = u.at("log_sigma_triplet").get<double>();
            cp.weights = std::move(w);
        }
        if (doc.contains("chains")) {
            const auto& c = doc["chains"];
            DenoiserShape shape;
            shape.channels = c.at("channels").get<std::size_t>();
            shape.kernel = c.at("kernel").get<std::size_t>();
            const auto length = c.at("length").get<std::size_t>();
            const auto steps = c.at("steps").get<std::size_t>();
            ReverseChains chains;
            Rng scratch(0);
            const auto& list = c.at("chains");
            if (list.size() != kAllChainKinds.size()) {
                throw DataError(context + ": expected four chains");
            }
            for (const auto& entry : list) {
                const auto kind = chain_kind_from_string(entry.at("kind").get<std::string>());
                ReverseChain chain;
                chain.kind = kind;
                const auto& denoisers = entry.at("denoisers");
                if (denoisers.size() != steps) {
                    throw DataError(context + ": chain " + to_string(kind) + " has " +
                                    std::to_string(denoisers.size()) + " denoisers, expected " +
                                    std::to_string(steps));
                }
                for (std::size_t t = 1; t <= steps; ++t) {
                    StepDenoiser d(t, length, shape, scratch);
                    restore_named(d.named_parameters(), denoisers[t - 1].at("parameters"), context);
                    chain.denoisers.push_back(std::move(d));
                }
                chains[kind] = std::move(chain);
            }
            cp.chains = std::move(chains);
        }
        return cp;
    } catch (const json::exception& e) {
        throw DataError(context + ": malformed field: " + e.what());
    }
}

}  // namespace cdnet
