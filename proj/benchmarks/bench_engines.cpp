/*
 * Copyright 2026 The photonlab authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include <benchmark/benchmark.h>

#include "photonlab/analysis.hpp"
#include "photonlab/engines.hpp"
#include "photonlab/numeric.hpp"

using namespace photonlab;

namespace {

DetectorArray reference_two() {
    return DetectorArray({{0.3, 0.2, 1.0, 0.0}, {0.2, 0.3, 1.0, 0.7 * kPi}});
}

void BM_PhaseAverageConditional(benchmark::State& state) {
    const DetectorArray arr = reference_two();
    const auto pair = SourcePair::independent(SourceSpec::poissonian(500.0), SourceSpec::poissonian(500.0));
    OutcomeGrid grid = default_grid(arr, pair);
    grid.axes[0] = {106, 106};
    for (auto _ : state) {
        auto dist = phase_average_joint(arr, pair, grid);
        benchmark::DoNotOptimize(dist.log_probs.data());
    }
}
BENCHMARK(BM_PhaseAverageConditional)->Unit(benchmark::kMillisecond);

void BM_PhaseAverageJoint2D(benchmark::State& state) {
    const DetectorArray arr = reference_two();
    const double nbar = static_cast<double>(state.range(0));
    const auto pair = SourcePair::independent(SourceSpec::poissonian(nbar), SourceSpec::poissonian(nbar));
    const OutcomeGrid grid = default_grid(arr, pair);
    for (auto _ : state) {
        auto dist = phase_average_joint(arr, pair, grid);
        benchmark::DoNotOptimize(dist.log_probs.data());
    }
}
BENCHMARK(BM_PhaseAverageJoint2D)->Arg(100)->Arg(250)->Unit(benchmark::kMillisecond);

void BM_FockConditionalSlice(benchmark::State& state) {
    const DetectorArray arr = reference_two();
    const long long n = state.range(0);
    const auto pair = SourcePair::independent(SourceSpec::number_state(n), SourceSpec::number_state(n));
    OutcomeGrid grid = default_grid(arr, pair);
    grid.axes[0] = {42, 42};
    EngineOptions opts;
    opts.allow_expensive = true;
    for (auto _ : state) {
        auto dist = fock_joint(arr, pair, grid, opts);
        benchmark::DoNotOptimize(dist.log_probs.data());
    }
}
BENCHMARK(BM_FockConditionalSlice)->Arg(100)->Arg(200)->Arg(400)->Unit(benchmark::kMillisecond);

void BM_FockDenseMixture(benchmark::State& state) {
    const DetectorArray arr = reference_two();
    const auto pair = SourcePair::independent(SourceSpec::binomial(0.5, 10.0), SourceSpec::binomial(0.5, 10.0));
    const OutcomeGrid grid = default_grid(arr, pair);
    for (auto _ : state) {
        auto dist = fock_joint(arr, pair, grid);
        benchmark::DoNotOptimize(dist.log_probs.data());
    }
}
BENCHMARK(BM_FockDenseMixture)->Unit(benchmark::kMillisecond);

void BM_RadialConditional(benchmark::State& state) {
    const DetectorArray arr = reference_two();
    const auto pair = SourcePair::independent(SourceSpec::super_poissonian(0.1, 100.0),
                                              SourceSpec::super_poissonian(0.1, 100.0));
    OutcomeGrid grid = default_grid(arr, pair);
    grid.axes[0] = {30, 30};
    EngineOptions opts;
    opts.allow_expensive = true;
    for (auto _ : state) {
        auto dist = radial_phase_average_joint(arr, pair, grid, opts);
        benchmark::DoNotOptimize(dist.log_probs.data());
    }
}
BENCHMARK(BM_RadialConditional)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
