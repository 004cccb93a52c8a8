// Copyright 2026 The CDNet Authors
// SPDX-License-Identifier: Apache-2.0

// Forward diffusion between instances. Each step shrinks the current state
// toward a partner series and injects Gaussian noise:
//
//   x^t = sqrt(1 - b_t) x^{t-1} + (1 - sqrt(1 - b_t)) partner + sqrt(b_t) eps
//
// The partner shares the anchor's class for the within-class process and
// comes from the other class for the across-class process.

#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "cdnet/dataio.hpp"
#include "cdnet/random.hpp"

namespace cdnet {

class NoiseSchedule {
public:
    /// Requires 0 < beta < 1 for every step and a non-decreasing sequence.
    explicit NoiseSchedule(std::vector<double> betas);
    /// Same checks but admits the closed interval [0, 1]; for degenerate
    /// schedules used in tests and analysis.
    static NoiseSchedule allow_degenerate(std::vector<double> betas);

    std::size_t steps() const { return betas_.size(); }
    /// Beta for 1-based step t.
    double beta(std::size_t t) const;
    const std::vector<double>& betas() const { return betas_; }

private:
    NoiseSchedule(std::vector<double> betas, bool closed);
    std::vector<double> betas_;
};

/// beta_t = beta_min + (beta_max - beta_min) (t - 1) / (T - 1); T = 1 gives [beta_min].
NoiseSchedule linear_schedule(std::size_t steps, double beta_min, double beta_max);

std::vector<double> forward_step(std::span<const double> previous, std::span<const double> partner,
                                 double beta, std::span<const double> noise);

enum class ProcessKind { Within, Across };

struct ForwardTrajectory {
    static constexpr std::size_t kNoIndex = std::numeric_limits<std::size_t>::max();

    std::size_t anchor_index = kNoIndex;
    std::size_t partner_index = kNoIndex;
    int anchor_label = 0;
    int partner_label = 0;
    ProcessKind kind = ProcessKind::Within;
    /// x^1 .. x^T.
    std::vector<std::vector<double>> states;
    /// The noise vectors added at each step (already scaled by noise_std).
    std::vector<std::vector<double>> noise_draws;

    /// x^t for t in [0, T], where x^0 is the anchor itself.
    std::span<const double> state(std::size_t t, const LabeledSeries& anchor) const;
};

ForwardTrajectory forward_trajectory(const LabeledSeries& anchor, const LabeledSeries& partner,
                                     const NoiseSchedule& schedule, double noise_std, Rng& rng);

/// Dataset-indexed form; records both indices in the trajectory.
ForwardTrajectory forward_trajectory(std::span<const LabeledSeries> data, std::size_t anchor_index,
                                     std::size_t partner_index, const NoiseSchedule& schedule,
                                     double noise_std, Rng& rng);

}  // namespace cdnet
