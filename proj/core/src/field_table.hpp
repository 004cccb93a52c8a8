// Copyright 2026 The CDNet Authors
// SPDX-License-Identifier: Apache-2.0

// Name -> member table shared by the flat JSON and command-line readers of
// the configuration structs.

#pragma once

#include <charconv>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "cdnet/error.hpp"

namespace cdnet::detail {

// Seeds are stored as std::uint64_t and share the std::size_t slot.
static_assert(std::is_same_v<std::size_t, std::uint64_t>);

template <typename Config>
struct Field {
    using Member = std::variant<std::size_t Config::*, double Config::*, int Config::*>;
    std::string name;
    Member member;

    Field(std::string n, std::size_t Config::*m) : name(std::move(n)), member(m) {}
    Field(std::string n, double Config::*m) : name(std::move(n)), member(m) {}
    Field(std::string n, int Config::*m) : name(std::move(n)), member(m) {}
};

template <typename Config>
nlohmann::json fields_to_json(const Config& config, const std::vector<Field<Config>>& fields) {
    nlohmann::json out = nlohmann::json::object();
    for (const auto& f : fields) {
        std::visit([&](auto member) { out[f.name] = config.*member; }, f.member);
    }
    return out;
}

template <typename Config>
void fields_from_json(Config& config, const std::vector<Field<Config>>& fields,
                      const nlohmann::json& in) {
    if (!in.is_object()) {
        throw ConfigError("configuration must be a flat JSON object");
    }
    for (const auto& f : fields) {
        const auto it = in.find(f.name);
        if (it == in.end()) continue;
        if (!it->is_number()) {
            throw ConfigError("configuration key '" + f.name + "' must be a number");
        }
        std::visit(
            [&](auto member) {
                using T = std::remove_reference_t<decltype(config.*member)>;
                if constexpr (std::is_integral_v<T>) {
                    if (!it->is_number_integer()) {
                        throw ConfigError("configuration key '" + f.name + "' must be an integer");
                    }
                    if constexpr (std::is_unsigned_v<T>) {
                        if (it->is_number_integer() && !it->is_number_unsigned()) {
                            throw ConfigError("configuration key '" + f.name +
                                              "' must be non-negative");
                        }
                    }
                }
                config.*member = it->template get<T>();
            },
            f.member);
    }
}

template <typename Config>
bool set_field(Config& config, const std::vector<Field<Config>>& fields, const std::string& key,
               const std::string& value) {
    for (const auto& f : fields) {
        if (f.name != key) continue;
        std::visit(
            [&](auto member) {
                using T = std::remove_reference_t<decltype(config.*member)>;
                T parsed{};
                const auto* end = value.data() + value.size();
                const auto [ptr, ec] = std::from_chars(value.data(), end, parsed);
                if (ec != std::errc() || ptr != end || value.empty()) {
                    throw ConfigError("cannot parse '" + value + "' for '" + key + "'");
                }
                config.*member = parsed;
            },
            f.member);
        return true;
    }
    return false;
}

template <typename Config>
std::vector<std::string> field_names(const std::vector<Field<Config>>& fields) {
    std::vector<std::string> names;
    for (const auto& f : fields) names.push_back(f.name);
    return names;
}

}  // namespace cdnet::detail
