// Copyright 2026 The CDNet Authors
// SPDX-License-Identifier: Apache-2.0

#include "cdnet/diffusion.hpp"

#include <cmath>
#include <string>

#include "cdnet/error.hpp"

namespace cdnet {

NoiseSchedule::NoiseSchedule(std::vector<double> betas) : NoiseSchedule(std::move(betas), false) {}

NoiseSchedule NoiseSchedule::allow_degenerate(std::vector<double> betas) {
    return NoiseSchedule(std::move(betas), true);
}

NoiseSchedule::NoiseSchedule(std::vector<double> betas, bool closed) : betas_(std::move(betas)) {
    if (betas_.empty()) {
        throw ConfigError("noise schedule needs at least one step");
    }
    for (std::size_t i = 0; i < betas_.size(); ++i) {
        const double b = betas_[i];
        const bool ok = closed ? (b >= 0.0 && b <= 1.0) : (b > 0.0 && b < 1.0);
        if (!ok) {
            throw ConfigError("beta at step " + std::to_string(i + 1) + " = " + std::to_string(b) +
                              " is outside " + (closed ? "[0, 1]" : "(0, 1)"));
        }
        if (i > 0 && b < betas_[i - 1]) {
            throw ConfigError("noise schedule must be non-decreasing (step " +
                              std::to_string(i + 1) + ")");
        }
    }
}

double NoiseSchedule::beta(std::size_t t) const {
    if (t == 0 || t > betas_.size()) {
        throw ConfigError("step " + std::to_string(t) + " outside 1.." + std::to_string(betas_.size()));
    }
    return betas_[t - 1];
}

NoiseSchedule linear_schedule(std::size_t steps, double beta_min, double beta_max) {
    if (steps == 0) {
        throw ConfigError("linear_schedule: T must be at least 1");
    }
    if (!(beta_min > 0.0 && beta_min <= beta_max && beta_max < 1.0)) {
        throw ConfigError("linear_schedule: need 0 < beta_min <= beta_max < 1");
    }
    std::vector<double> betas(steps, beta_min);
    for (std::size_t t = 1; t < steps; ++t) {
        betas[t] = beta_min + (beta_max - beta_min) * static_cast<double>(t) /
                                  static_cast<double>(steps - 1);
    }
    return NoiseSchedule(std::move(betas));
}

std::vector<double> forward_step(std::span<const double> previous, std::span<const double> partner,
                                 double beta, std::span<const double> noise) {
    if (previous.size() != partner.size() || previous.size() != noise.size()) {
        throw ShapeError("forward_step: lengths differ (" + std::to_string(previous.size()) + ", " +
                         std::to_string(partner.size()) + ", " + std::to_string(noise.size()) + ")");
    }
    const double keep = std::sqrt(1.0 - beta);
    const double mix = 1.0 - keep;
    const double spread = std::sqrt(beta);
    std::vector<double> out(previous.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = keep * previous[i] + mix * partner[i] + spread * noise[i];
    }
    return out;
}

std::span<const double> ForwardTrajectory::state(std::size_t t, const LabeledSeries& anchor) const {
    if (t == 0) {
        return anchor.values;
    }
    if (t > states.size()) {
        throw ConfigError("trajectory state " + std::to_string(t) + " outside 0.." +
                          std::to_string(states.size()));
    }
    return states[t - 1];
}

ForwardTrajectory forward_trajectory(const LabeledSeries& anchor, const LabeledSeries& partner,
                                     const NoiseSchedule& schedule, double noise_std, Rng& rng) {
    if (anchor.length() != partner.length()) {
        throw ShapeError("forward_trajectory: anchor length " + std::to_string(anchor.length()) +
                         " differs from partner length " + std::to_string(partner.length()));
    }
    if (noise_std < 0.0) {
        throw ConfigError("forward_trajectory: noise_std must be non-negative");
    }
    ForwardTrajectory traj;
    traj.anchor_label = anchor.label;
    traj.partner_label = partner.label;
    traj.kind = anchor.label == partner.label ? ProcessKind::Within : ProcessKind::Across;
    traj.states.reserve(schedule.steps());
    traj.noise_draws.reserve(schedule.steps());
    std::span<const double> previous = anchor.values;
    for (std::size_t t = 1; t <= schedule.steps(); ++t) {
        auto noise = normal_vector(anchor.length(), noise_std, rng);
        traj.states.push_back(forward_step(previous, partner.values, schedule.beta(t), noise));
        traj.noise_draws.push_back(std::move(noise));
        previous = traj.states.back();
    }
    return traj;
}

ForwardTrajectory forward_trajectory(std::span<const LabeledSeries> data, std::size_t anchor_index,
                                     std::size_t partner_index, const NoiseSchedule& schedule,
                                     double noise_std, Rng& rng) {
    if (anchor_index >= data.size() || partner_index >= data.size()) {
        throw DataError("forward_trajectory: index out of range");
    }
    auto traj = forward_trajectory(data[anchor_index], data[partner_index], schedule, noise_std, rng);
    traj.anchor_index = anchor_index;
    traj.partner_index = partner_index;
    return traj;
}

}  // namespace cdnet
