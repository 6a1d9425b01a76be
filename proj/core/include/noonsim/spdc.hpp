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

#include <array>
#include <complex>
#include <string>
#include <vector>

#include "noonsim/elements.hpp"
#include "noonsim/fock.hpp"

namespace noonsim {

/// Phase of the pump-mirror arm. The mirror sits in the pump path, so a
/// mirror displacement dx changes the optical path by ds = 2 dx; the
/// single-photon phase is dphi = 2 pi ds / lambda.
struct PhaseConfig {
    double lambda_single_nm = 790.0;
    double mirror_displacement_nm = 0.0;

    double optical_path_nm() const { return 2.0 * mirror_displacement_nm; }
    double delta_phi() const;
};

/// dphi = 2 pi (2 dx) / lambda.
double phase_from_mirror(double mirror_displacement_nm, double lambda_nm);

/// Truncated double-pass pair emission. `pair_amplitude` is the single-pair
/// probability p per pass; the k-pair sector of emit() carries weight
/// p^{k/2} times the series combinatorics. `vv_pair_phase` is the relative
/// phase of the VV component of each emitted pair; the physical setup is
/// aligned so that the recombined state behind the polarizing beamsplitters
/// has a + correlation, which ties this phase to the PBS convention (see
/// source_alignment_phase).
struct EmissionConfig {
    double pair_amplitude = 0.01;
    int max_pairs = 2; // guard against basis explosion; must be <= 3
    std::array<std::string, 2> forward_modes{"a1", "a2"};
    std::array<std::string, 2> backward_modes{"b1", "b2"};
    Complex vv_pair_phase{1.0, 0.0};

    void validate() const;
};

/// VV phase that aligns the emitted pair state to the given PBS reflection
/// convention (+1 for real reflections, -1 for imaginary ones): with it, the
/// post-selected states behind the PBS are identical under both conventions.
Complex source_alignment_phase(PbsConvention convention);

enum class EmissionDirection { forward, backward };

/// Pair-creation operator for one pass:
///   forward:  (m1_H' m2_H' + c m1_V' m2_V') / sqrt(2)
///   backward: same on the backward modes, times e^{i 2 dphi}
/// where c is the alignment phase and every backward pair carries the
/// doubled single-photon phase of the reflected pump.
CreationPolynomial pair_operator(const EmissionConfig& cfg, EmissionDirection direction,
                                 const PhaseConfig& phase);

/// Registers the six emission labels (forward, backward) with H and V modes.
void register_emission_modes(ModeRegistry& registry, const EmissionConfig& cfg);

/// Truncated emission series sum_{k<=max_pairs} (sqrt(p))^k K^k / k! |vac>
/// with K the sum of the forward and backward pair operators. Unnormalized;
/// the k-pair sector contains exactly the 2k-photon terms.
Ket emit(const RegistryPtr& registry, const EmissionConfig& cfg, const PhaseConfig& phase);

/// One coherent component of the emission, tagged by how many pairs came
/// from each pass. Summing all components reproduces emit(); measurement
/// uses the grouping to model partial distinguishability of the two passes.
struct EmissionComponent {
    int forward_pairs = 0;
    int backward_pairs = 0;
    Ket ket;
};

std::vector<EmissionComponent> emit_grouped(const RegistryPtr& registry, const EmissionConfig& cfg,
                                            const PhaseConfig& phase);

/// Coefficients of the two-pair (four-photon) sector on the path-number
/// component states (pair operator squared on one side, or one pair on each
/// side), relative to the unnormalized operator monomials at zero phase.
/// For the emission series these are proportional to (1, 2 e^{i2 dphi},
/// e^{i4 dphi}) - the one-pair-each-side component enters with twice the
/// coefficient of either double-pass component.
struct PathSectorCoefficients {
    Complex all_forward;  // coefficient on S_f^2 |vac>
    Complex one_each;     // coefficient on S_f S_b(0) |vac>
    Complex all_backward; // coefficient on S_b(0)^2 |vac>
};

PathSectorCoefficients path_sector_coefficients(const Ket& emitted, const EmissionConfig& cfg);

/// Path-entangled number state across two modes:
/// (|N, 0> + e^{i N dphi} |0, N>) / sqrt(2).
struct NoonSpec {
    int photons = 1;
    ModeId mode_a{"a1", Polarization::H};
    ModeId mode_b{"b1", Polarization::H};
    double delta_phi = 0.0;
};

Ket noon_state(const RegistryPtr& registry, const NoonSpec& spec);

} // namespace noonsim
