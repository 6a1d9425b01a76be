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

#include <functional>
#include <map>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "noonsim/fock.hpp"

namespace noonsim {

using CountSpec = std::map<std::string, int>;

enum class AnalyzerSign { plus, minus };

char to_char(AnalyzerSign s);

/// Polarization analyzer in front of a detector: rotate (H, V) by theta,
/// then accept the photon(s) in the rotated H mode for '+' or the rotated V
/// mode for '-'. At theta = pi/4 the outcomes are the |+> and |-> linear
/// polarization projections.
struct AnalyzerSetting {
    AnalyzerSign sign = AnalyzerSign::plus;
    double theta = std::numbers::pi / 4.0;
};

/// Coincidence pattern (required photon count per spatial label, other
/// labels unconstrained) plus optional analyzers on counted labels.
struct DetectionSpec {
    CountSpec counts;
    std::map<std::string, AnalyzerSetting> analyzers;

    void validate(const ModeRegistry& registry) const;

    /// Analyzed labels in lexicographic order; fixes the digit order of
    /// sign-pattern strings such as "+-++".
    std::vector<std::string> analyzed_labels() const;

    /// Same counts/angles with the signs replaced by `pattern` (one +/- per
    /// analyzed label, lexicographic label order).
    DetectionSpec with_pattern(const std::string& pattern) const;
};

/// Partial distinguishability of the emission components: interference
/// between different origin groups is scaled by V. V = 1 is fully coherent;
/// V = 0 removes every cross-group fringe.
struct VisibilityModel {
    double v = 1.0;

    void validate() const;
};

/// Unnormalized projection onto the subspace where every listed spatial
/// label holds exactly the required total photon count (all polarizations
/// summed). Returns an empty ket when nothing survives.
Ket postselect_counts(const Ket& ket, const CountSpec& counts);

/// Probability of the coincidence pattern itself: ||P ket||^2 / ||ket||^2.
double coincidence_probability(const Ket& ket, const CountSpec& counts);
double coincidence_probability(std::span<const Ket> origin_groups, const CountSpec& counts,
                               const VisibilityModel& vis = {});

/// Conditional probability of the analyzer outcomes given the coincidence
/// counts. The state is renormalized within the post-selected sector, then
/// the per-label analyzer projections are applied. Returns 0 for an empty
/// sector. The single-ket overload describes a fully coherent state and
/// rejects V < 1 (origin grouping is required to attenuate interference).
double detection_probability(const Ket& ket, const DetectionSpec& spec,
                             const VisibilityModel& vis = {});
double detection_probability(std::span<const Ket> origin_groups, const DetectionSpec& spec,
                             const VisibilityModel& vis = {});

/// All 2^m analyzer outcome probabilities for the m analyzed labels, keyed
/// by sign strings in analyzed_labels() order. Sums to 1 for singly
/// occupied analyzed labels.
std::map<std::string, double> pattern_distribution(const Ket& ket, const CountSpec& counts,
                                                   double theta = std::numbers::pi / 4.0);

/// Uniform phase grid [start, stop), endpoint excluded so that the samples
/// tile the period for discrete Fourier analysis.
struct PhaseGrid {
    double start = 0.0;
    double stop = 2.0 * std::numbers::pi;
    int points = 64;
};

/// Sweeps dphi over the grid and returns the sign patterns whose fringe
/// P(dphi) oscillates purely at the requested harmonic: every other nonzero
/// harmonic must stay below 1e-9 of it. For the four-photon coincidence this
/// selects exactly the odd-parity patterns (sign product -1).
std::vector<std::string> find_pure_projections(const std::function<Ket(double)>& state_at_phase,
                                               const CountSpec& counts, int harmonic,
                                               const PhaseGrid& grid = {});

} // namespace noonsim
