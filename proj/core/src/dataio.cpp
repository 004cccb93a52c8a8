// Copyright 2026 The CDNet Authors
// SPDX-License-Identifier: Apache-2.0

#include "cdnet/dataio.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "cdnet/error.hpp"

namespace cdnet {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::optional<double> parse_double(std::string_view text) {
    text = trim(text);
    if (!text.empty() && text.front() == '+') {
        text.remove_prefix(1);
    }
    double value = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end || text.empty()) {
        return std::nullopt;
    }
    return value;
}

std::vector<std::string_view> split_fields(std::string_view line, char delimiter) {
    std::vector<std::string_view> fields;
    if (delimiter == ' ') {
        std::size_t pos = 0;
        while (pos < line.size()) {
            const auto start = line.find_first_not_of(" \t", pos);
            if (start == std::string_view::npos) break;
            const auto stop = line.find_first_of(" \t", start);
            fields.push_back(line.substr(start, stop == std::string_view::npos ? line.npos : stop - start));
            pos = stop == std::string_view::npos ? line.size() : stop;
        }
        return fields;
    }
    std::size_t start = 0;
    while (true) {
        const auto stop = line.find(delimiter, start);
        fields.push_back(trim(line.substr(start, stop == std::string_view::npos ? line.npos : stop - start)));
        if (stop == std::string_view::npos) break;
        start = stop + 1;
    }
    return fields;
}

struct RawRow {
    std::string label;
    std::vector<double> values;
};

std::vector<RawRow> read_rows(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open " + path.string());
    }
    std::vector<RawRow> rows;
    std::string line;
    char delimiter = 0;
    std::size_t expected = 0;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view view = trim(line);
        if (view.empty()) {
            continue;
        }
        if (delimiter == 0) {
            delimiter = view.find('\t') != std::string_view::npos ? '\t'
                        : view.find(',') != std::string_view::npos ? ','
                                                                    : ' ';
        }
        const auto fields = split_fields(view, delimiter);
        if (fields.size() < 2) {
            throw DataError(path.string() + ": row " + std::to_string(line_no) +
                            " has no series values");
        }
        RawRow row;
        row.label = std::string(fields[0]);
        row.values.reserve(fields.size() - 1);
        for (std::size_t k = 1; k < fields.size(); ++k) {
            const auto value = parse_double(fields[k]);
            if (!value || !std::isfinite(*value)) {
                throw DataError(path.string() + ": unparseable value '" + std::string(fields[k]) +
                                "' at row " + std::to_string(line_no) + ", column " +
                                std::to_string(k + 1));
            }
            row.values.push_back(*value);
        }
        if (rows.empty()) {
            expected = row.values.size();
        } else if (row.values.size() != expected) {
            throw DataError(path.string() + ": ragged row " + std::to_string(line_no) + " has " +
                            std::to_string(row.values.size()) + " values, expected " +
                            std::to_string(expected));
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) {
        throw DataError(path.string() + ": no series found");
    }
    return rows;
}

LoadedSplit finish_split(std::vector<RawRow> rows, bool normalize, LabelMap label_map,
                         const std::filesystem::path& path) {
    LoadedSplit split;
    split.label_map = std::move(label_map);
    split.series.reserve(rows.size());
    const auto stem = path.filename().string();
    for (std::size_t i = 0; i < rows.size(); ++i) {
        LabeledSeries s;
        s.label = split.label_map.map(rows[i].label);
        s.values = std::move(rows[i].values);
        s.source_id = stem + ":" + std::to_string(i);
        if (normalize) {
            z_normalize(s.values);
        }
        split.series.push_back(std::move(s));
    }
    return split;
}

bool label_less(const std::string& a, const std::string& b) {
    const auto na = parse_double(a);
    const auto nb = parse_double(b);
    if (na && nb && *na != *nb) {
        return *na < *nb;
    }
    if (na.has_value() != nb.has_value()) {
        return na.has_value();
    }
    return a < b;
}

std::string format_double(double v) {
    char buffer[64];
    const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), v);
    return std::string(buffer, ptr);
}

}  // namespace

LabelMap LabelMap::from_labels(std::vector<std::string> distinct) {
    std::sort(distinct.begin(), distinct.end(), label_less);
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() > 2) {
        std::string listing;
        for (const auto& l : distinct) listing += (listing.empty() ? "" : ", ") + l;
        throw DataError("binary only: found " + std::to_string(distinct.size()) +
                        " distinct labels (" + listing + ")");
    }
    LabelMap map;
    map.originals_ = std::move(distinct);
    return map;
}

int LabelMap::map(const std::string& original) const {
    for (std::size_t i = 0; i < originals_.size(); ++i) {
        if (originals_[i] == original) {
            return static_cast<int>(i);
        }
    }
    throw DataError("label '" + original + "' is not in the label map");
}

const std::string& LabelMap::original(int mapped) const {
    if (mapped < 0 || static_cast<std::size_t>(mapped) >= originals_.size()) {
        throw DataError("mapped label " + std::to_string(mapped) + " out of range");
    }
    return originals_[static_cast<std::size_t>(mapped)];
}

std::size_t Dataset::length() const {
    if (train.empty() || test.empty()) {
        throw DataError("dataset '" + name + "' needs non-empty train and test splits");
    }
    const std::size_t m = train.front().length();
    auto check = [m, this](const std::vector<LabeledSeries>& split, const char* which) {
        for (std::size_t i = 0; i < split.size(); ++i) {
            if (split[i].length() != m) {
                throw DataError("dataset '" + name + "': " + which + " series " +
                                std::to_string(i) + " has length " +
                                std::to_string(split[i].length()) + ", expected " +
                                std::to_string(m));
            }
        }
    };
    check(train, "train");
    check(test, "test");
    return m;
}

void Dataset::validate() const {
    const std::size_t m = length();
    if (m < kMinSeriesLength) {
        throw DataError("dataset '" + name + "': series length " + std::to_string(m) +
                        " is below the minimum of " + std::to_string(kMinSeriesLength));
    }
    if (label_map.size() != 2) {
        throw DataError("dataset '" + name + "' must have exactly two classes");
    }
    for (const auto* split : {&train, &test}) {
        for (const auto& s : *split) {
            if (s.label != 0 && s.label != 1) {
                throw DataError("dataset '" + name + "': label outside {0, 1}");
            }
            for (double v : s.values) {
                if (!std::isfinite(v)) {
                    throw DataError("dataset '" + name + "' contains a non-finite value");
                }
            }
        }
    }
}

LoadedSplit load_ucr_split(const std::filesystem::path& path, bool normalize) {
    auto rows = read_rows(path);
    std::vector<std::string> labels;
    for (const auto& r : rows) labels.push_back(r.label);
    auto map = LabelMap::from_labels(std::move(labels));
    return finish_split(std::move(rows), normalize, std::move(map), path);
}

LoadedSplit load_ucr_split(const std::filesystem::path& path, bool normalize,
                           const LabelMap& label_map) {
    return finish_split(read_rows(path), normalize, label_map, path);
}

void save_split(std::span<const LabeledSeries> series, const LabelMap& label_map,
                const std::filesystem::path& path) {
    if (series.empty()) {
        throw DataError("refusing to save an empty split to " + path.string());
    }
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw DataError("cannot write " + path.string());
    }
    for (const auto& s : series) {
        out << label_map.original(s.label);
        for (double v : s.values) {
            out << '\t' << format_double(v);
        }
        out << '\n';
    }
    if (!out) {
        throw DataError("write failed for " + path.string());
    }
}

std::filesystem::path train_file(const std::filesystem::path& dir, const std::string& name) {
    return dir / (name + "_TRAIN.tsv");
}

std::filesystem::path test_file(const std::filesystem::path& dir, const std::string& name) {
    return dir / (name + "_TEST.tsv");
}

void save_dataset(const Dataset& dataset, const std::filesystem::path& dir) {
    if (dataset.train.empty() || dataset.test.empty()) {
        throw DataError("refusing to save dataset '" + dataset.name + "' with an empty split");
    }
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    save_split(dataset.train, dataset.label_map, train_file(dir, dataset.name));
    save_split(dataset.test, dataset.label_map, test_file(dir, dataset.name));
}

Dataset load_dataset(const std::filesystem::path& dir, const std::string& name, bool normalize) {
    Dataset dataset;
    dataset.name = name;
    auto train_rows = read_rows(train_file(dir, name));
    auto test_rows = read_rows(test_file(dir, name));
    std::vector<std::string> labels;
    for (const auto& r : train_rows) labels.push_back(r.label);
    for (const auto& r : test_rows) labels.push_back(r.label);
    auto map = LabelMap::from_labels(std::move(labels));
    dataset.train = finish_split(std::move(train_rows), normalize, map, train_file(dir, name)).series;
    dataset.test = finish_split(std::move(test_rows), normalize, map, test_file(dir, name)).series;
    dataset.label_map = std::move(map);
    return dataset;
}

void z_normalize(std::span<double> values) {
    if (values.empty()) {
        return;
    }
    const double n = static_cast<double>(values.size());
    const double mu = std::accumulate(values.begin(), values.end(), 0.0) / n;
    double var = 0.0;
    for (double v : values) var += (v - mu) * (v - mu);
    const double sd = std::sqrt(var / n);
    for (auto& v : values) {
        v = sd < 1e-9 ? 0.0 : (v - mu) / sd;
    }
}

std::vector<std::size_t> indices_of_class(std::span<const LabeledSeries> data, int label) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (data[i].label == label) out.push_back(i);
    }
    return out;
}

}  // namespace cdnet
