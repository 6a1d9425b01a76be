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

#include "noonsim/spdc.hpp"

#include <cmath>
#include <numbers>

namespace noonsim {

namespace {

double factorial_small(int n) {
    double out = 1.0;
    for (int i = 2; i <= n; ++i) out *= i;
    return out;
}

double binomial(int n, int k) {
    return factorial_small(n) / (factorial_small(k) * factorial_small(n - k));
}

} // namespace

double phase_from_mirror(double mirror_displacement_nm, double lambda_nm) {
    if (lambda_nm <= 0.0) throw ConfigError("wavelength must be positive");
    return 2.0 * std::numbers::pi * (2.0 * mirror_displacement_nm) / lambda_nm;
}

double PhaseConfig::delta_phi() const {
    return phase_from_mirror(mirror_displacement_nm, lambda_single_nm);
}

void EmissionConfig::validate() const {
    if (!(pair_amplitude > 0.0 && pair_amplitude < 1.0)) {
        throw ConfigError("pair_amplitude must be in (0, 1)");
    }
    if (max_pairs < 1 || max_pairs > 3) {
        throw ConfigError("max_pairs must be between 1 and 3");
    }
    if (std::abs(std::abs(vv_pair_phase) - 1.0) > 1e-12) {
        throw ConfigError("vv_pair_phase must have unit magnitude");
    }
}

Complex source_alignment_phase(PbsConvention convention) {
    // The VV component reflects once at each PBS; the alignment phase is the
    // conjugate of the two accumulated reflection phases.
    return convention == PbsConvention::real_reflection ? Complex{1.0} : Complex{-1.0};
}

CreationPolynomial pair_operator(const EmissionConfig& cfg, EmissionDirection direction,
                                 const PhaseConfig& phase) {
    cfg.validate();
    const auto& modes =
        direction == EmissionDirection::forward ? cfg.forward_modes : cfg.backward_modes;
    Complex scale{std::numbers::sqrt2 / 2.0}; // 1/sqrt(2)
    if (direction == EmissionDirection::backward) {
        // Both photons of a backward pair are created by the retro-reflected
        // pump and share the doubled single-photon phase.
        scale *= std::polar(1.0, 2.0 * phase.delta_phi());
    }

    CreationMonomial hh(scale, {{ModeId{modes[0], Polarization::H}, 1},
                                {ModeId{modes[1], Polarization::H}, 1}});
    CreationMonomial vv(scale * cfg.vv_pair_phase, {{ModeId{modes[0], Polarization::V}, 1},
                                                    {ModeId{modes[1], Polarization::V}, 1}});
    return CreationPolynomial{hh, vv};
}

void register_emission_modes(ModeRegistry& registry, const EmissionConfig& cfg) {
    for (const auto& label : cfg.forward_modes) registry.add_spatial(label);
    for (const auto& label : cfg.backward_modes) registry.add_spatial(label);
}

Ket emit(const RegistryPtr& registry, const EmissionConfig& cfg, const PhaseConfig& phase) {
    Ket total(registry);
    for (const auto& component : emit_grouped(registry, cfg, phase)) total += component.ket;
    return total;
}

std::vector<EmissionComponent> emit_grouped(const RegistryPtr& registry, const EmissionConfig& cfg,
                                            const PhaseConfig& phase) {
    cfg.validate();
    const CreationPolynomial forward = pair_operator(cfg, EmissionDirection::forward, phase);
    const CreationPolynomial backward = pair_operator(cfg, EmissionDirection::backward, phase);
    const double sqrt_p = std::sqrt(cfg.pair_amplitude);

    // Powers of each pass operator on vacuum, shared across components.
    std::vector<Ket> forward_powers{Ket::vacuum(registry)};
    std::vector<Ket> backward_powers{Ket::vacuum(registry)};
    for (int k = 1; k <= cfg.max_pairs; ++k) {
        forward_powers.push_back(apply_polynomial(forward_powers.back(), forward));
        backward_powers.push_back(apply_polynomial(backward_powers.back(), backward));
    }

    // (S_f + S_b)^k / k! = sum_j S_f^j S_b^{k-j} / (j! (k-j)!)
    std::vector<EmissionComponent> components;
    for (int k = 0; k <= cfg.max_pairs; ++k) {
        const double series = std::pow(sqrt_p, k) / factorial_small(k);
        for (int j = k; j >= 0; --j) {
            Ket ket = backward_powers[static_cast<std::size_t>(k - j)];
            for (int step = 0; step < j; ++step) ket = apply_polynomial(ket, forward);
            ket *= Complex{series * binomial(k, j)};
            components.push_back({j, k - j, std::move(ket)});
        }
    }
    return components;
}

PathSectorCoefficients path_sector_coefficients(const Ket& emitted, const EmissionConfig& cfg) {
    const auto& registry = emitted.registry();
    const Ket sector = photon_number_sector(emitted, 4);
    if (sector.empty()) throw RuntimeError("emission has no four-photon sector");

    // Reference component kets: the pair operators at zero mirror phase.
    const PhaseConfig zero_phase{};
    const CreationPolynomial sf = pair_operator(cfg, EmissionDirection::forward, zero_phase);
    const CreationPolynomial sb = pair_operator(cfg, EmissionDirection::backward, zero_phase);

    const Ket vac = Ket::vacuum(registry);
    const Ket ref_ff = apply_polynomial(apply_polynomial(vac, sf), sf);
    const Ket ref_fb = apply_polynomial(apply_polynomial(vac, sb), sf);
    const Ket ref_bb = apply_polynomial(apply_polynomial(vac, sb), sb);

    auto forward_photons = [&](const FockBasisState& state) {
        int count = 0;
        for (const auto& label : cfg.forward_modes) {
            for (std::size_t idx : registry->spatial_indices(label)) {
                count += state.occupation(idx);
            }
        }
        return count;
    };

    auto extract = [&](const Ket& reference_ket, int forward_count) {
        Ket part(registry);
        for (const auto& [state, amp] : sector.terms()) {
            if (forward_photons(state) == forward_count) part.add_term(state, amp);
        }
        const double ref_norm2 = reference_ket.norm_squared();
        const Complex coeff = inner_product(reference_ket, part) / ref_norm2;
        // The component must be an exact multiple of the reference shape.
        Ket residual = part + (-coeff) * reference_ket;
        if (residual.norm() > 1e-10 * (part.norm() + 1e-30)) {
            throw RuntimeError("four-photon sector does not factor over path-number components");
        }
        return coeff;
    };

    return PathSectorCoefficients{
        .all_forward = extract(ref_ff, 4),
        .one_each = extract(ref_fb, 2),
        .all_backward = extract(ref_bb, 0),
    };
}

Ket noon_state(const RegistryPtr& registry, const NoonSpec& spec) {
    if (spec.photons < 1) throw ConfigError("noon state needs at least one photon");
    const Complex amp{std::numbers::sqrt2 / 2.0};
    const Complex phased =
        amp * std::polar(1.0, static_cast<double>(spec.photons) * spec.delta_phi);

    CreationMonomial all_a{1.0, {{spec.mode_a, spec.photons}}};
    CreationMonomial all_b{1.0, {{spec.mode_b, spec.photons}}};

    const Ket vac = Ket::vacuum(registry);
    // (a^dagger)^N |vac> = sqrt(N!) |N>; divide it back out to land on the
    // normalized two-term superposition.
    const double unit = 1.0 / std::sqrt(factorial_small(spec.photons));
    Ket state = apply_monomial(vac, all_a) * (amp * unit);
    state += apply_monomial(vac, all_b) * (phased * unit);
    return state;
}

} // namespace noonsim
