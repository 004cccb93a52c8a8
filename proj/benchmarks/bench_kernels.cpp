// Copyright 2026 The CDNet Authors
// SPDX-License-Identifier: Apache-2.0

// Hot paths of training: the convolution primitive, one denoiser step and a
// classifier forward pass, at the default series length.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "cdnet/classifier.hpp"
#include "cdnet/reverse_chain.hpp"
#include "cdnet/tensor.hpp"

using namespace cdnet;

namespace {

Tensor filled(Shape shape, Rng& rng, bool grad = false) {
    std::normal_distribution<double> n(0.0, 0.3);
    std::vector<double> v(shape_size(shape));
    for (auto& x : v) x = n(rng);
    return Tensor(std::move(v), std::move(shape), grad);
}

void BM_Conv1dForward(benchmark::State& state) {
    const auto channels = static_cast<std::size_t>(state.range(0));
    const auto length = static_cast<std::size_t>(state.range(1));
    Rng rng = derive_rng(1, 0);
    const Tensor x = filled({channels, length}, rng);
    const Tensor w = filled({channels, channels, 5}, rng);
    const Tensor b = filled({channels}, rng);
    for (auto _ : state) {
        Tape tape(GradMode::Disabled);
        benchmark::DoNotOptimize(conv1d(tape, x, w, b, Padding::Same).values().data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(channels * channels * length * 5));
}
BENCHMARK(BM_Conv1dForward)->Args({16, 128})->Args({32, 128})->Args({16, 512});

void BM_Conv1dBackward(benchmark::State& state) {
    const auto channels = static_cast<std::size_t>(state.range(0));
    const std::size_t length = 128;
    Rng rng = derive_rng(2, 0);
    const Tensor x = filled({channels, length}, rng, true);
    const Tensor w = filled({channels, channels, 5}, rng, true);
    const Tensor b = filled({channels}, rng, true);
    for (auto _ : state) {
        Tape tape;
        const Tensor y = conv1d(tape, x, w, b, Padding::Same);
        tape.backward(sum(tape, y));
        benchmark::DoNotOptimize(w.grad().data());
    }
}
BENCHMARK(BM_Conv1dBackward)->Arg(16)->Arg(32);

void BM_DenoiserApply(benchmark::State& state) {
    const auto length = static_cast<std::size_t>(state.range(0));
    Rng rng = derive_rng(3, 0);
    const StepDenoiser d(1, length, DenoiserShape{16, 5, false}, rng);
    const Tensor x = filled({length}, rng);
    const std::vector<double> input(x.values().begin(), x.values().end());
    for (auto _ : state) benchmark::DoNotOptimize(d.apply(input));
}
BENCHMARK(BM_DenoiserApply)->Arg(128)->Arg(512);

void BM_DenoiserTrainStep(benchmark::State& state) {
    const std::size_t length = 128;
    Rng rng = derive_rng(4, 0);
    const StepDenoiser d(1, length, DenoiserShape{}, rng);
    const Tensor x = filled({length}, rng);
    const Tensor target = filled({length}, rng);
    for (auto _ : state) {
        Tape tape;
        const Tensor loss = squared_distance(tape, d.forward(tape, x), target);
        tape.backward(loss);
        benchmark::DoNotOptimize(loss.item());
    }
}
BENCHMARK(BM_DenoiserTrainStep);

void BM_ClassifierForward(benchmark::State& state) {
    const auto length = static_cast<std::size_t>(state.range(0));
    Rng rng = derive_rng(5, 0);
    const SmallCnn net(length, 32, rng);
    const Tensor x = filled({length}, rng);
    for (auto _ : state) {
        Tape tape(GradMode::Disabled);
        benchmark::DoNotOptimize(net.logits(tape, x).values().data());
    }
}
BENCHMARK(BM_ClassifierForward)->Arg(128)->Arg(512);

}  // namespace

BENCHMARK_MAIN();
