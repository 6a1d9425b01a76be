/**
 * Copyright 2026 The noonsim authors
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

#include <cmath>
#include <numbers>

#include "noonsim/analysis.hpp"

using namespace noonsim;

namespace {

FringeSeries fringe(int points) {
    FringeSeries series;
    for (int i = 0; i < points; ++i) {
        const double x = 5.0 * i;
        series.points.push_back(
            {x, (1.0 - std::cos(2.0 * std::numbers::pi * x / 197.5)) / 32.0, std::nullopt});
    }
    return series;
}

} // namespace

static void EstimatePeriod(benchmark::State& state) {
    const FringeSeries series = fringe(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(dominant_period(series));
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(EstimatePeriod)->RangeMultiplier(2)->Range(64, 1024)->Complexity();

static void FitCosine(benchmark::State& state) {
    const FringeSeries series = fringe(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(fit_cosine(series));
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(FitCosine)->RangeMultiplier(2)->Range(64, 512)->Complexity();

static void FitSampledCosine(benchmark::State& state) {
    const FringeSeries series = sample_counts(fringe(161), 10000, 42);
    for (auto _ : state) {
        benchmark::DoNotOptimize(fit_cosine(series));
    }
}
BENCHMARK(FitSampledCosine);

BENCHMARK_MAIN();
