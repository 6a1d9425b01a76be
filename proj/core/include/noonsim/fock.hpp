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

#include <complex>
#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "noonsim/errors.hpp"

namespace noonsim {

using Complex = std::complex<double>;

/// Stored amplitudes smaller than this in magnitude are dropped after every
/// operation. Below the double-precision noise floor for the state sizes
/// handled here; keeps sparse maps from accumulating dead terms.
inline constexpr double kAmplitudeEpsilon = 1e-14;

enum class Polarization : std::uint8_t { H, V };

char to_char(Polarization p);

/// One optical mode: a spatial label ("a1", "b3", ...) plus a polarization.
struct ModeId {
    std::string spatial;
    Polarization pol;

    friend auto operator<=>(const ModeId&, const ModeId&) = default;
};

std::string to_string(const ModeId& m);

/// Maps modes to dense indices. Append-only within a run; kets remain valid
/// when new modes are registered later (missing occupations read as zero).
/// Registries are shared explicitly (no global), so independent experiments
/// can coexist in one process.
class ModeRegistry {
public:
    /// Registers a mode; returns its dense index. Registering an existing
    /// mode returns the existing index.
    std::size_t add(const ModeId& mode);

    /// Registers both polarization modes of a spatial label (H first).
    void add_spatial(const std::string& spatial);

    std::optional<std::size_t> find(const ModeId& mode) const;

    /// Index of a registered mode; throws ConfigError if not registered.
    std::size_t index_of(const ModeId& mode) const;

    bool has_spatial(const std::string& spatial) const;

    /// Dense indices of every polarization mode of a spatial label.
    std::vector<std::size_t> spatial_indices(const std::string& spatial) const;

    const ModeId& mode(std::size_t index) const { return modes_.at(index); }
    std::size_t size() const { return modes_.size(); }

private:
    std::vector<ModeId> modes_;
    std::map<ModeId, std::size_t> index_;
};

using RegistryPtr = std::shared_ptr<const ModeRegistry>;

/// Occupation numbers over registered modes, in registration order.
/// Vectors shorter than the registry are implicitly zero-padded on the right.
class FockBasisState {
public:
    FockBasisState() = default;
    explicit FockBasisState(std::size_t num_modes) : occ_(num_modes, 0) {}
    explicit FockBasisState(std::vector<std::uint8_t> occupations)
        : occ_(std::move(occupations)) {}

    static FockBasisState vacuum(std::size_t num_modes) { return FockBasisState(num_modes); }

    std::uint8_t occupation(std::size_t mode_index) const {
        return mode_index < occ_.size() ? occ_[mode_index] : std::uint8_t{0};
    }

    /// Mutating add; grows the vector if needed. `count` may not drive the
    /// occupation negative.
    void add(std::size_t mode_index, int count);

    int total_photons() const;

    std::size_t num_modes() const { return occ_.size(); }
    std::span<const std::uint8_t> occupations() const { return occ_; }

    /// Copy padded/truncated to exactly `num_modes` entries. Truncation of a
    /// nonzero occupation is a logic error and throws.
    FockBasisState resized(std::size_t num_modes) const;

    friend bool operator==(const FockBasisState& a, const FockBasisState& b) {
        return a.occ_ == b.occ_;
    }
    friend std::strong_ordering operator<=>(const FockBasisState& a, const FockBasisState& b) {
        return a.occ_ <=> b.occ_;
    }

private:
    std::vector<std::uint8_t> occ_;
};

/// Sparse complex-amplitude superposition over Fock basis states. All keys
/// share one registry and one key length; amplitudes below kAmplitudeEpsilon
/// are pruned. Immutable by convention once built: operations return fresh
/// kets, so sharing across threads is safe.
class Ket {
public:
    using TermMap = std::map<FockBasisState, Complex>;

    explicit Ket(RegistryPtr registry);

    static Ket vacuum(RegistryPtr registry);
    static Ket basis(RegistryPtr registry, FockBasisState state, Complex amplitude = 1.0);

    const TermMap& terms() const { return terms_; }
    const RegistryPtr& registry() const { return registry_; }

    bool empty() const { return terms_.empty(); }
    std::size_t num_terms() const { return terms_.size(); }

    /// Accumulates `amplitude` onto a basis state. Keys are padded to the
    /// current registry size so kets created before a registry grew stay
    /// compatible.
    void add_term(const FockBasisState& state, Complex amplitude);

    /// Amplitude of a basis state (0 if absent).
    Complex amplitude(const FockBasisState& state) const;

    double norm_squared() const;
    double norm() const;

    /// Drops terms with |amplitude| < kAmplitudeEpsilon.
    void prune();

    Ket& operator+=(const Ket& other);
    Ket& operator*=(Complex scale);
    friend Ket operator+(Ket lhs, const Ket& rhs) { lhs += rhs; return lhs; }
    friend Ket operator*(Ket lhs, Complex scale) { lhs *= scale; return lhs; }
    friend Ket operator*(Complex scale, Ket rhs) { rhs *= scale; return rhs; }

    /// One line per term, "amp_re amp_im : n_1 n_2 ... n_M", modes in
    /// registration order, terms in lexicographic occupation order.
    std::string debug_string() const;

private:
    RegistryPtr registry_;
    TermMap terms_;
};

/// coefficient * prod_m (a_m^dagger)^{p_m}, exponents >= 1.
struct CreationMonomial {
    Complex coefficient = 1.0;
    std::map<ModeId, int> powers;

    CreationMonomial() = default;
    CreationMonomial(Complex coeff, std::map<ModeId, int> pows);

    CreationMonomial& raise(const ModeId& mode, int exponent = 1);
};

/// Sum of creation monomials; applying it to a ket is linear over terms.
struct CreationPolynomial {
    std::vector<CreationMonomial> monomials;

    CreationPolynomial() = default;
    CreationPolynomial(std::initializer_list<CreationMonomial> ms) : monomials(ms) {}

    CreationPolynomial& operator+=(const CreationMonomial& m);
    CreationPolynomial& operator*=(Complex scale);
};

/// Applies a creation monomial: each |n> maps to
/// coefficient * sqrt((n_m+1)...(n_m+p_m)) |n+p>, linearly over terms.
/// Throws ConfigError if a mode in the monomial is not registered.
Ket apply_monomial(const Ket& ket, const CreationMonomial& monomial);

/// Applies a sum of monomials.
Ket apply_polynomial(const Ket& ket, const CreationPolynomial& poly);

/// <x|y>, conjugate-linear in x. Throws ConfigError on registry mismatch.
Complex inner_product(const Ket& x, const Ket& y);

/// Returns ket/||ket||. Throws RuntimeError if the norm is below
/// kAmplitudeEpsilon (typically an empty post-selection sector).
Ket normalize(const Ket& ket);

/// Terms with exactly `photons` total photons (unnormalized filter).
Ket photon_number_sector(const Ket& ket, int photons);

} // namespace noonsim
