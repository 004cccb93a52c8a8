// Copyright 2026 The CDNet Authors
// SPDX-License-Identifier: Apache-2.0

// Average-rank comparison of several methods over several datasets, with the
// Friedman statistic and the Nemenyi critical difference at alpha = 0.05.

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "cdnet/evaluation.hpp"

namespace cdnet {

struct AccuracyMatrix {
    std::vector<std::string> methods;
    std::vector<std::string> datasets;
    /// accuracy[m][d]
    std::vector<std::vector<double>> accuracy;
};

struct RankTable {
    std::vector<std::string> methods;
    std::vector<std::string> datasets;
    /// ranks[d][m]; rank 1 is the most accurate, ties share the average rank.
    std::vector<std::vector<double>> ranks;
    std::vector<double> mean_ranks;
    double friedman_statistic = 0.0;
    double nemenyi_cd = 0.0;
};

/// Ranks of `values` in descending order with average ranks for ties.
std::vector<double> descending_ranks(std::span<const double> values);

/// Studentized range quantile divided by sqrt(2) for alpha = 0.05, k in 2..10.
double nemenyi_q05(std::size_t k);

RankTable rank_methods(const AccuracyMatrix& matrix);

/// Averages runs per (dataset, method). Throws when some dataset lacks a
/// method.
AccuracyMatrix accuracy_matrix(std::span<const RunResult> runs);

std::string rank_table_json(const RankTable& table);

}  // namespace cdnet
