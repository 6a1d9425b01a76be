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

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "noonsim/measurement.hpp"
#include "noonsim/spdc.hpp"

namespace noonsim {

/// Double-pass pair source; the alignment phase is derived from the
/// experiment's PBS convention unless a config overrides it.
struct SpdcSource {
    EmissionConfig emission;
};

/// Path-entangled N-photon input, phase-modulated between the two paths.
struct NoonSource {
    int photons = 1;
    std::string path_a = "a1";
    std::string path_b = "b1";
};

/// Single photon split between the forward and the retro-reflected path,
/// recombined on a PBS: (|H>_a1 + e^{i dphi} |V>_b1) / sqrt(2).
struct SinglePhotonMzSource {
    std::string path_a = "a1";
    std::string path_b = "b1";
};

using SourceConfig = std::variant<SpdcSource, NoonSource, SinglePhotonMzSource>;

struct PbsElement {
    std::string in1, in2, out1, out2;
};
struct BsElement {
    ModeId m1, m2;
    double reflectivity = 0.5;
};
struct PhaseElement {
    std::vector<ModeId> modes;
    double phi_rad = 0.0;
    double sweep_multiplier = 0.0; // phi = phi_rad + multiplier * dphi(sweep point)
};
struct RotationElement {
    std::string spatial;
    double theta_rad = 0.0;
};

using ElementConfig = std::variant<PbsElement, BsElement, PhaseElement, RotationElement>;

struct DetectionConfig {
    CountSpec counts;
    std::map<std::string, AnalyzerSign> analyzer_signs;
    double analyzer_theta = std::numbers::pi / 4.0;
    /// Additional sign patterns to evaluate (one fringe series each); when
    /// empty, only the analyzer_signs pattern is produced.
    std::vector<std::string> patterns;
};

struct SweepSpec {
    double start_mirror_nm = 0.0;
    double stop_mirror_nm = 400.0;
    int steps = 161; // inclusive endpoints
};

struct SamplingSpec {
    std::int64_t shots_per_point = 10000;
};

/// Illustrative coincidence-rate model for the run summary; never used in
/// fits. Expected rate = rep_rate * p^pairs * eta^photons * P.
struct RateModel {
    double rep_rate_hz = 76.0e6;
    double detector_efficiency = 0.2;
};

struct ExperimentConfig {
    int version = 1;
    SourceConfig source;
    std::vector<ElementConfig> circuit;
    DetectionConfig detection;
    SweepSpec sweep;
    std::optional<SamplingSpec> sampling;
    std::optional<RateModel> rates;
    double visibility = 1.0;
    double lambda_single_nm = 790.0;
    PbsConvention pbs_convention = PbsConvention::real_reflection;
    std::uint64_t rng_seed = 0;

    void validate() const;

    static ExperimentConfig from_json(const nlohmann::json& j);
    static ExperimentConfig from_file(const std::filesystem::path& path);
    nlohmann::json to_json() const;

    /// FNV-1a hash of the canonical JSON form, as 16 hex digits.
    std::string hash() const;
};

struct FringePoint {
    double optical_path_nm = 0.0;
    double probability = 0.0;
    std::optional<std::int64_t> counts;

    friend bool operator==(const FringePoint&, const FringePoint&) = default;
};

/// Probability (and optionally sampled counts) versus optical path
/// ds = 2 dx. The x axis is always the optical path, never the raw mirror
/// position.
struct FringeSeries {
    std::vector<FringePoint> points;
    std::string pattern;     // sign pattern label, empty when unanalyzed
    std::string config_hash; // hash of the generating config, empty if none

    bool has_counts() const;
    friend bool operator==(const FringeSeries&, const FringeSeries&) = default;
};

/// Runs the phase sweep: one series per requested sign pattern. Sweep points
/// may be evaluated concurrently (see max_threads); ordering by optical path
/// is preserved.
std::vector<FringeSeries> run_sweep(const ExperimentConfig& config);

/// Thread cap used by run_sweep: the NOON_SIM_THREADS environment variable
/// when set, otherwise the hardware concurrency.
unsigned sweep_thread_cap();

/// Draws per-point counts ~ Poisson(shots * probability), deterministically
/// under the seed (std::mt19937_64 engine, sampled sequentially per series).
FringeSeries sample_counts(const FringeSeries& series, std::int64_t shots, std::uint64_t seed);

/// CSV persistence. Format: optional "# key=value" metadata lines, a header
/// "optical_path_nm,probability[,counts]", then one row per point with
/// 17-significant-digit floats (lossless round-trip).
void write_series(const FringeSeries& series, std::ostream& out);
void write_series(const FringeSeries& series, const std::filesystem::path& path);
FringeSeries read_series(std::istream& in, const std::string& name = "<stream>");
FringeSeries read_series(const std::filesystem::path& path);

/// Small JSON run report: pattern, point count, probability range, config
/// hash, and the illustrative rate estimate when a rate model is present.
nlohmann::json summarize_series(const FringeSeries& series, const ExperimentConfig& config);

} // namespace noonsim
