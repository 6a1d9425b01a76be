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

#include <Eigen/Dense>
#include <numbers>
#include <random>

#include "noonsim/measurement.hpp"
#include "noonsim/spdc.hpp"

using namespace noonsim;

namespace {

RegistryPtr full_registry() {
    auto registry = std::make_shared<ModeRegistry>();
    for (const char* label : {"a1", "a2", "b1", "b2", "a3", "a4", "b3", "b4"}) {
        registry->add_spatial(label);
    }
    return registry;
}

ModeTransform recombination(const RegistryPtr& registry) {
    return pbs(registry, "a1", "b1", "a3", "b3").then(pbs(registry, "a2", "b2", "a4", "b4"));
}

PhaseConfig phase_at(double dphi) {
    PhaseConfig phase;
    phase.mirror_displacement_nm = dphi * phase.lambda_single_nm / (4.0 * std::numbers::pi);
    return phase;
}

Eigen::MatrixXcd random_unitary(std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXcd g(n, n);
    for (Eigen::Index r = 0; r < g.rows(); ++r) {
        for (Eigen::Index c = 0; c < g.cols(); ++c) g(r, c) = Complex{gauss(rng), gauss(rng)};
    }
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
    return qr.householderQ();
}

} // namespace

static void EmissionSeries(benchmark::State& state) {
    auto registry = full_registry();
    EmissionConfig cfg;
    cfg.max_pairs = static_cast<int>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(emit(registry, cfg, phase_at(0.7)));
    }
}
BENCHMARK(EmissionSeries)->DenseRange(1, 3);

static void RecombinedSweepPoint(benchmark::State& state) {
    auto registry = full_registry();
    EmissionConfig cfg;
    const auto circuit = recombination(registry);
    const DetectionSpec spec = [] {
        DetectionSpec s;
        s.counts = {{"a3", 1}, {"a4", 1}, {"b3", 1}, {"b4", 1}};
        for (const char* label : {"a3", "a4", "b3", "b4"}) {
            s.analyzers[label] = {AnalyzerSign::plus, std::numbers::pi / 4.0};
        }
        return s;
    }();
    double dphi = 0.0;
    for (auto _ : state) {
        dphi += 0.01;
        const Ket routed = apply_transform(emit(registry, cfg, phase_at(dphi)), circuit);
        benchmark::DoNotOptimize(detection_probability(routed, spec));
    }
}
BENCHMARK(RecombinedSweepPoint);

static void DenseUnitaryLift(benchmark::State& state) {
    const auto photons = static_cast<int>(state.range(0));
    const std::size_t modes = 6;
    auto registry = std::make_shared<ModeRegistry>();
    for (std::size_t m = 0; m < modes; ++m) {
        registry->add({"m" + std::to_string(m), Polarization::H});
    }
    RegistryPtr frozen = registry;

    std::mt19937_64 rng(5);
    const ModeTransform u(frozen, random_unitary(modes, rng));
    FockBasisState input(frozen->size());
    for (int p = 0; p < photons; ++p) input.add(static_cast<std::size_t>(p) % modes, 1);
    const Ket ket = Ket::basis(frozen, input);

    for (auto _ : state) {
        benchmark::DoNotOptimize(apply_transform(ket, u));
    }
    state.SetComplexityN(photons);
}
BENCHMARK(DenseUnitaryLift)->DenseRange(1, 6)->Complexity();

BENCHMARK_MAIN();
