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

#include <Eigen/Dense>
#include <span>
#include <string>
#include <vector>

#include "noonsim/fock.hpp"

namespace noonsim {

/// Phase convention for the polarizing beamsplitter's V reflections.
///
/// The default is a real (+1) reflection, the simplest unitary completion.
/// The imaginary convention multiplies every V reflection by i. Post-selected
/// observables of an aligned source are identical under both (the alignment
/// phase of the pair source absorbs the convention, see spdc.hpp); the
/// alternative exists so that tests can demonstrate exactly that.
enum class PbsConvention { real_reflection, imaginary_reflection };

/// A unitary on mode creation operators, a_j^dagger -> sum_k U_kj a_k^dagger,
/// lifted homomorphically to Fock space by apply_transform. Identity on
/// untouched modes; U'U = I within 1e-12 is checked at construction.
class ModeTransform {
public:
    ModeTransform(RegistryPtr registry, Eigen::MatrixXcd matrix);

    static ModeTransform identity(RegistryPtr registry);

    const Eigen::MatrixXcd& matrix() const { return matrix_; }
    const RegistryPtr& registry() const { return registry_; }
    std::span<const std::size_t> touched_modes() const { return touched_; }

    /// Composition: applying the result equals applying *this, then `next`.
    ModeTransform then(const ModeTransform& next) const;

private:
    RegistryPtr registry_;
    Eigen::MatrixXcd matrix_;
    std::vector<std::size_t> touched_;
};

/// Two-mode beamsplitter block [[sqrt(T), i sqrt(R)], [i sqrt(R), sqrt(T)]]
/// with T = 1 - R (symmetric convention, i on reflection).
ModeTransform beamsplitter(const RegistryPtr& registry, const ModeId& m1, const ModeId& m2,
                           double reflectivity);

/// Polarizing beamsplitter: transmits H, reflects V.
///   in1_H -> out1_H, in2_H -> out2_H, in1_V -> out2_V, in2_V -> out1_V,
/// completed to a unitary by the inverse routing on the output labels.
/// All four spatial labels must be distinct and carry H and V modes.
ModeTransform pbs(const RegistryPtr& registry, const std::string& in1, const std::string& in2,
                  const std::string& out1, const std::string& out2,
                  PbsConvention convention = PbsConvention::real_reflection);

/// Diagonal phase e^{i phi} on the listed modes.
ModeTransform phase_shift(const RegistryPtr& registry, std::span<const ModeId> modes, double phi);

/// Rotation [[cos t, sin t], [-sin t, cos t]] on the (H, V) pair of a spatial
/// label; theta = pi/4 realizes the +/- linear-polarization analyzer basis.
ModeTransform polarization_rotation(const RegistryPtr& registry, const std::string& spatial,
                                    double theta);

/// Lifts the mode unitary to Fock space: every basis term is expanded by
/// substituting a_j^dagger -> sum_k U_kj a_k^dagger and collecting the
/// multinomial expansion back into Fock terms. Photon number is conserved
/// exactly; the norm is preserved to 1e-12.
Ket apply_transform(const Ket& ket, const ModeTransform& transform);

} // namespace noonsim
