// Copyright 2026 The CDNet Authors
// SPDX-License-Identifier: Apache-2.0

// Binary-labelled univariate series and UCR-archive text files.
//
// A UCR split file has one series per line: the class label first, then the
// values, separated by tabs or commas (detected from the first line). Labels
// are mapped to {0, 1} in ascending numeric order, falling back to
// lexicographic order for non-numeric labels.

#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace cdnet {

inline constexpr std::size_t kMinSeriesLength = 8;

struct LabeledSeries {
    std::vector<double> values;
    int label = 0;
    std::string source_id;

    std::size_t length() const { return values.size(); }
};

/// Original label text for mapped labels 0 and 1.
class LabelMap {
public:
    LabelMap() = default;
    /// Builds the canonical mapping from the distinct labels seen in a file.
    static LabelMap from_labels(std::vector<std::string> distinct);

    int map(const std::string& original) const;
    const std::string& original(int mapped) const;
    std::size_t size() const { return originals_.size(); }
    const std::vector<std::string>& originals() const { return originals_; }

    bool operator==(const LabelMap&) const = default;

private:
    std::vector<std::string> originals_;
};

struct Dataset {
    std::string name;
    std::vector<LabeledSeries> train;
    std::vector<LabeledSeries> test;
    LabelMap label_map;

    /// Common series length; throws DataError when splits disagree or are empty.
    std::size_t length() const;
    void validate() const;
};

struct LoadedSplit {
    std::vector<LabeledSeries> series;
    LabelMap label_map;
};

LoadedSplit load_ucr_split(const std::filesystem::path& path, bool normalize);
/// Loads a split using an existing label mapping (e.g. the TEST file of a
/// dataset whose mapping was fixed by its TRAIN file).
LoadedSplit load_ucr_split(const std::filesystem::path& path, bool normalize,
                           const LabelMap& label_map);

void save_split(std::span<const LabeledSeries> series, const LabelMap& label_map,
                const std::filesystem::path& path);

/// Writes `<dir>/<name>_TRAIN.tsv` and `<dir>/<name>_TEST.tsv`.
void save_dataset(const Dataset& dataset, const std::filesystem::path& dir);
Dataset load_dataset(const std::filesystem::path& dir, const std::string& name, bool normalize);

std::filesystem::path train_file(const std::filesystem::path& dir, const std::string& name);
std::filesystem::path test_file(const std::filesystem::path& dir, const std::string& name);

/// In-place z-normalization with the population standard deviation. A series
/// whose standard deviation is below 1e-9 becomes all zeros.
void z_normalize(std::span<double> values);

/// Indices of the series in `data` carrying `label`.
std::vector<std::size_t> indices_of_class(std::span<const LabeledSeries> data, int label);

}  // namespace cdnet
