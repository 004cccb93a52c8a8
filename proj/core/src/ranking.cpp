// Copyright 2026 The CDNet Authors
// SPDX-License-Identifier: Apache-2.0

#include "cdnet/ranking.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <utility>

#include "cdnet/error.hpp"
#include "json.hpp"

namespace cdnet {

std::vector<double> descending_ranks(std::span<const double> values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i + 1;
        while (j < n && values[order[j]] == values[order[i]]) ++j;
        // Positions i..j-1 share ranks i+1..j; their mean is (i + 1 + j) / 2.
        const double shared = 0.5 * static_cast<double>(i + 1 + j);
        for (std::size_t p = i; p < j; ++p) ranks[order[p]] = shared;
        i = j;
    }
    return ranks;
}

double nemenyi_q05(std::size_t k) {
    static constexpr std::array<double, 9> table = {1.960, 2.343, 2.569, 2.728, 2.850,
                                                    2.949, 3.031, 3.102, 3.164};
    if (k < 2 || k > 10) {
        throw ConfigError("Nemenyi critical values cover 2..10 methods, got " + std::to_string(k));
    }
    return table[k - 2];
}

RankTable rank_methods(const AccuracyMatrix& matrix) {
    const std::size_t k = matrix.methods.size();
    const std::size_t n = matrix.datasets.size();
    if (k < 2) throw ConfigError("ranking needs at least 2 methods");
    if (n < 2) throw ConfigError("ranking needs at least 2 datasets");
    if (matrix.accuracy.size() != k) {
        throw DataError("accuracy matrix has " + std::to_string(matrix.accuracy.size()) +
                        " rows for " + std::to_string(k) + " methods");
    }
    for (std::size_t m = 0; m < k; ++m) {
        if (matrix.accuracy[m].size() != n) {
            throw DataError("method '" + matrix.methods[m] + "' is missing dataset entries");
        }
        for (std::size_t d = 0; d < n; ++d) {
            if (!std::isfinite(matrix.accuracy[m][d])) {
                throw DataError("accuracy of '" + matrix.methods[m] + "' on '" + matrix.datasets[d] +
                                "' is not finite");
            }
        }
    }
    const double cd_q = nemenyi_q05(k);

    RankTable table;
    table.methods = matrix.methods;
    table.datasets = matrix.datasets;
    table.mean_ranks.assign(k, 0.0);
    std::vector<double> column(k);
    for (std::size_t d = 0; d < n; ++d) {
        for (std::size_t m = 0; m < k; ++m) column[m] = matrix.accuracy[m][d];
        auto ranks = descending_ranks(column);
        for (std::size_t m = 0; m < k; ++m) table.mean_ranks[m] += ranks[m];
        table.ranks.push_back(std::move(ranks));
    }
    const double kd = static_cast<double>(k);
    const double nd = static_cast<double>(n);
    double sum_sq = 0.0;
    for (auto& r : table.mean_ranks) {
        r /= nd;
        sum_sq += r * r;
    }
    table.friedman_statistic =
        12.0 * nd / (kd * (kd + 1.0)) * (sum_sq - kd * (kd + 1.0) * (kd + 1.0) / 4.0);
    table.nemenyi_cd = cd_q * std::sqrt(kd * (kd + 1.0) / (6.0 * nd));
    return table;
}

AccuracyMatrix accuracy_matrix(std::span<const RunResult> runs) {
    if (runs.empty()) throw DataError("no runs to rank");
    std::map<std::pair<std::string, std::string>, std::pair<double, std::size_t>> cells;
    std::vector<std::string> methods, datasets;
    for (const auto& r : runs) {
        if (std::find(methods.begin(), methods.end(), r.method_name) == methods.end()) {
            methods.push_back(r.method_name);
        }
        if (std::find(datasets.begin(), datasets.end(), r.dataset_name) == datasets.end()) {
            datasets.push_back(r.dataset_name);
        }
        auto& cell = cells[{r.method_name, r.dataset_name}];
        cell.first += r.accuracy;
        cell.second += 1;
    }
    // Sorted keys keep the matrix independent of run order.
    std::sort(methods.begin(), methods.end());
    std::sort(datasets.begin(), datasets.end());
    AccuracyMatrix matrix;
    matrix.methods = methods;
    matrix.datasets = datasets;
    for (const auto& m : methods) {
        std::vector<double> row;
        for (const auto& d : datasets) {
            const auto it = cells.find({m, d});
            if (it == cells.end()) {
                throw DataError("no result for method '" + m + "' on dataset '" + d + "'");
            }
            row.push_back(it->second.first / static_cast<double>(it->second.second));
        }
        matrix.accuracy.push_back(std::move(row));
    }
    return matrix;
}

std::string rank_table_json(const RankTable& table) {
    nlohmann::json doc;
    doc["methods"] = table.methods;
    doc["datasets"] = table.datasets;
    doc["ranks"] = table.ranks;
    doc["mean_ranks"] = table.mean_ranks;
    doc["friedman_statistic"] = table.friedman_statistic;
    doc["nemenyi_cd"] = table.nemenyi_cd;
    return doc.dump(2);
}

}  // namespace cdnet
