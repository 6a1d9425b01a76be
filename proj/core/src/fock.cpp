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

#include "noonsim/fock.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

namespace noonsim {

char to_char(Polarization p) { return p == Polarization::H ? 'H' : 'V'; }

std::string to_string(const ModeId& m) {
    return m.spatial + "_" + to_char(m.pol);
}

std::size_t ModeRegistry::add(const ModeId& mode) {
    auto it = index_.find(mode);
    if (it != index_.end()) return it->second;
    const std::size_t idx = modes_.size();
    modes_.push_back(mode);
    index_.emplace(mode, idx);
    return idx;
}

void ModeRegistry::add_spatial(const std::string& spatial) {
    add(ModeId{spatial, Polarization::H});
    add(ModeId{spatial, Polarization::V});
}

std::optional<std::size_t> ModeRegistry::find(const ModeId& mode) const {
    auto it = index_.find(mode);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::size_t ModeRegistry::index_of(const ModeId& mode) const {
    auto idx = find(mode);
    if (!idx) throw ConfigError("mode not registered: " + to_string(mode));
    return *idx;
}

bool ModeRegistry::has_spatial(const std::string& spatial) const {
    return find(ModeId{spatial, Polarization::H}).has_value() ||
           find(ModeId{spatial, Polarization::V}).has_value();
}

std::vector<std::size_t> ModeRegistry::spatial_indices(const std::string& spatial) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < modes_.size(); ++i) {
        if (modes_[i].spatial == spatial) out.push_back(i);
    }
    if (out.empty()) throw ConfigError("spatial label not registered: " + spatial);
    return out;
}

void FockBasisState::add(std::size_t mode_index, int count) {
    if (mode_index >= occ_.size()) occ_.resize(mode_index + 1, 0);
    const int updated = static_cast<int>(occ_[mode_index]) + count;
    if (updated < 0) throw RuntimeError("negative occupation");
    occ_[mode_index] = static_cast<std::uint8_t>(updated);
}

int FockBasisState::total_photons() const {
    return std::accumulate(occ_.begin(), occ_.end(), 0);
}

FockBasisState FockBasisState::resized(std::size_t num_modes) const {
    for (std::size_t i = num_modes; i < occ_.size(); ++i) {
        if (occ_[i] != 0) throw RuntimeError("cannot truncate occupied mode");
    }
    std::vector<std::uint8_t> occ(occ_.begin(),
                                  occ_.begin() + static_cast<std::ptrdiff_t>(
                                                     std::min(num_modes, occ_.size())));
    occ.resize(num_modes, 0);
    return FockBasisState(std::move(occ));
}

Ket::Ket(RegistryPtr registry) : registry_(std::move(registry)) {
    if (!registry_) throw ConfigError("ket requires a registry");
}

Ket Ket::vacuum(RegistryPtr registry) {
    Ket ket(std::move(registry));
    ket.add_term(FockBasisState::vacuum(ket.registry_->size()), 1.0);
    return ket;
}

Ket Ket::basis(RegistryPtr registry, FockBasisState state, Complex amplitude) {
    Ket ket(std::move(registry));
    ket.add_term(state, amplitude);
    return ket;
}

void Ket::add_term(const FockBasisState& state, Complex amplitude) {
    terms_[state.resized(registry_->size())] += amplitude;
}

Complex Ket::amplitude(const FockBasisState& state) const {
    auto it = terms_.find(state.resized(registry_->size()));
    return it == terms_.end() ? Complex{0.0} : it->second;
}

double Ket::norm_squared() const {
    double sum = 0.0;
    for (const auto& [state, amp] : terms_) sum += std::norm(amp);
    return sum;
}

double Ket::norm() const { return std::sqrt(norm_squared()); }

void Ket::prune() {
    std::erase_if(terms_, [](const auto& term) {
        return std::abs(term.second) < kAmplitudeEpsilon;
    });
}

Ket& Ket::operator+=(const Ket& other) {
    if (registry_ != other.registry_) throw ConfigError("ket registry mismatch");
    for (const auto& [state, amp] : other.terms_) add_term(state, amp);
    prune();
    return *this;
}

Ket& Ket::operator*=(Complex scale) {
    for (auto& [state, amp] : terms_) amp *= scale;
    prune();
    return *this;
}

namespace {

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

std::string Ket::debug_string() const {
    std::ostringstream out;
    for (const auto& [state, amp] : terms_) {
        out << format_double(amp.real()) << ' ' << format_double(amp.imag()) << " :";
        for (std::size_t i = 0; i < registry_->size(); ++i) {
            out << ' ' << static_cast<int>(state.occupation(i));
        }
        out << '\n';
    }
    return out.str();
}

CreationMonomial::CreationMonomial(Complex coeff, std::map<ModeId, int> pows)
    : coefficient(coeff), powers(std::move(pows)) {
    for (const auto& [mode, p] : powers) {
        if (p < 1) throw ConfigError("creation exponent must be >= 1 for " + to_string(mode));
    }
}

CreationMonomial& CreationMonomial::raise(const ModeId& mode, int exponent) {
    if (exponent < 1) throw ConfigError("creation exponent must be >= 1 for " + to_string(mode));
    powers[mode] += exponent;
    return *this;
}

CreationPolynomial& CreationPolynomial::operator+=(const CreationMonomial& m) {
    monomials.push_back(m);
    return *this;
}

CreationPolynomial& CreationPolynomial::operator*=(Complex scale) {
    for (auto& m : monomials) m.coefficient *= scale;
    return *this;
}

Ket apply_monomial(const Ket& ket, const CreationMonomial& monomial) {
    const auto& registry = ket.registry();
    std::vector<std::pair<std::size_t, int>> resolved;
    resolved.reserve(monomial.powers.size());
    for (const auto& [mode, power] : monomial.powers) {
        resolved.emplace_back(registry->index_of(mode), power);
    }

    Ket out(registry);
    for (const auto& [state, amp] : ket.terms()) {
        FockBasisState raised = state.resized(registry->size());
        double ladder = 1.0;
        for (const auto& [idx, power] : resolved) {
            const int n = raised.occupation(idx);
            // sqrt((n+1)(n+2)...(n+p))
            for (int step = 1; step <= power; ++step) ladder *= n + step;
            raised.add(idx, power);
        }
        out.add_term(raised, amp * monomial.coefficient * std::sqrt(ladder));
    }
    out.prune();
    return out;
}

Ket apply_polynomial(const Ket& ket, const CreationPolynomial& poly) {
    Ket out(ket.registry());
    for (const auto& monomial : poly.monomials) out += apply_monomial(ket, monomial);
    out.prune();
    return out;
}

Complex inner_product(const Ket& x, const Ket& y) {
    if (x.registry() != y.registry()) throw ConfigError("inner product across registries");
    // Iterate the smaller map.
    const Ket& small = x.num_terms() <= y.num_terms() ? x : y;
    const Ket& large = x.num_terms() <= y.num_terms() ? y : x;
    Complex sum = 0.0;
    for (const auto& [state, amp] : small.terms()) {
        auto it = large.terms().find(state);
        if (it == large.terms().end()) continue;
        const Complex& xa = (&small == &x) ? amp : it->second;
        const Complex& ya = (&small == &x) ? it->second : amp;
        sum += std::conj(xa) * ya;
    }
    return sum;
}

Ket normalize(const Ket& ket) {
    const double n = ket.norm();
    if (n < kAmplitudeEpsilon) {
        throw RuntimeError("cannot normalize a zero ket (empty post-selection sector?)");
    }
    return ket * Complex{1.0 / n};
}

Ket photon_number_sector(const Ket& ket, int photons) {
    Ket out(ket.registry());
    for (const auto& [state, amp] : ket.terms()) {
        if (state.total_photons() == photons) out.add_term(state, amp);
    }
    return out;
}

} // namespace noonsim
