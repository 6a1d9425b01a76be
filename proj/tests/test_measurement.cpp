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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "noonsim/measurement.hpp"
#include "noonsim/spdc.hpp"

using namespace noonsim;

namespace {

constexpr double kPi = std::numbers::pi;

RegistryPtr full_registry() {
    auto registry = std::make_shared<ModeRegistry>();
    for (const char* label : {"a1", "a2", "b1", "b2", "a3", "a4", "b3", "b4"}) {
        registry->add_spatial(label);
    }
    return registry;
}

FockBasisState occupation(const RegistryPtr& registry,
                          std::initializer_list<std::pair<ModeId, int>> modes) {
    FockBasisState state(registry->size());
    for (const auto& [mode, n] : modes) state.add(registry->index_of(mode), n);
    return state;
}

ModeTransform recombination(const RegistryPtr& registry,
                            PbsConvention convention = PbsConvention::real_reflection) {
    return pbs(registry, "a1", "b1", "a3", "b3", convention)
        .then(pbs(registry, "a2", "b2", "a4", "b4", convention));
}

PhaseConfig phase_at(double delta_phi) {
    PhaseConfig phase;
    phase.mirror_displacement_nm = delta_phi * phase.lambda_single_nm / (4.0 * kPi);
    return phase;
}

const CountSpec kFourFold{{"a3", 1}, {"a4", 1}, {"b3", 1}, {"b4", 1}};
const CountSpec kTwoFold{{"a3", 1}, {"a4", 1}};

DetectionSpec four_fold_spec(const std::string& pattern) {
    DetectionSpec spec;
    spec.counts = kFourFold;
    for (const auto& label : {"a3", "a4", "b3", "b4"}) spec.analyzers[label] = {};
    return spec.with_pattern(pattern);
}

DetectionSpec two_fold_spec(const std::string& pattern) {
    DetectionSpec spec;
    spec.counts = kTwoFold;
    for (const auto& label : {"a3", "a4"}) spec.analyzers[label] = {};
    return spec.with_pattern(pattern);
}

Ket recombined_emission(const RegistryPtr& registry, double dphi, int max_pairs = 2,
                        PbsConvention convention = PbsConvention::real_reflection) {
    EmissionConfig cfg;
    cfg.max_pairs = max_pairs;
    cfg.vv_pair_phase = source_alignment_phase(convention);
    return apply_transform(emit(registry, cfg, phase_at(dphi)),
                           recombination(registry, convention));
}

std::vector<Ket> recombined_groups(const RegistryPtr& registry, double dphi,
                                   PbsConvention convention = PbsConvention::real_reflection) {
    EmissionConfig cfg;
    cfg.vv_pair_phase = source_alignment_phase(convention);
    const auto circuit = recombination(registry, convention);
    std::vector<Ket> groups;
    for (auto& component : emit_grouped(registry, cfg, phase_at(dphi))) {
        groups.push_back(apply_transform(component.ket, circuit));
    }
    return groups;
}

double sign_of(char c) { return c == '+' ? 1.0 : -1.0; }

/// Hand-derived conditional probability of a four-fold analyzer pattern:
/// starting from the normalized post-selected amplitudes (1/2)(1, e^{i4p},
/// e^{i2p}, e^{i2p}) and projector overlaps <s|H> = 1/sqrt(2),
/// <s|V> = s/sqrt(2),
///   P(s) = |s3 s4 + s1 s2 e^{i4p} + (1 + s1 s2 s3 s4) e^{i2p}|^2 / 64.
double four_fold_oracle(const std::string& pattern, double dphi) {
    const double s1 = sign_of(pattern[0]);
    const double s2 = sign_of(pattern[1]);
    const double s3 = sign_of(pattern[2]);
    const double s4 = sign_of(pattern[3]);
    const Complex amp = s3 * s4 + s1 * s2 * std::polar(1.0, 4.0 * dphi) +
                        (1.0 + s1 * s2 * s3 * s4) * std::polar(1.0, 2.0 * dphi);
    return std::norm(amp) / 64.0;
}

std::vector<std::string> all_patterns(std::size_t m) {
    std::vector<std::string> out;
    for (std::size_t bits = 0; bits < (std::size_t{1} << m); ++bits) {
        std::string pattern(m, '+');
        for (std::size_t i = 0; i < m; ++i) {
            if (bits & (std::size_t{1} << i)) pattern[i] = '-';
        }
        out.push_back(pattern);
    }
    return out;
}

bool odd_parity(const std::string& pattern) {
    return std::count(pattern.begin(), pattern.end(), '-') % 2 == 1;
}

} // namespace

TEST_CASE("postselection keeps exactly the one-photon-per-port terms") {
    auto registry = full_registry();
    const Ket recombined = recombined_emission(registry, 0.77);
    const Ket sector = postselect_counts(recombined, kFourFold);
    CHECK(sector.num_terms() == 4);
    for (const auto& [state, amp] : sector.terms()) {
        CHECK(state.total_photons() == 4);
    }
}

TEST_CASE("postselecting the vacuum yields an empty ket") {
    auto registry = full_registry();
    const Ket sector = postselect_counts(Ket::vacuum(registry), {{"a3", 1}});
    CHECK(sector.empty());
}

TEST_CASE("a doubled forward pair cannot satisfy one photon per port") {
    // (HH pair)^2 routes both photons of each port into the same output, so
    // the one-per-port filter removes everything.
    auto registry = full_registry();
    CreationMonomial hh{1.0, {{{"a1", Polarization::H}, 1}, {{"a2", Polarization::H}, 1}}};
    Ket state = apply_monomial(apply_monomial(Ket::vacuum(registry), hh), hh);
    state = apply_transform(state, recombination(registry));
    CHECK(postselect_counts(state, kFourFold).empty());
}

TEST_CASE("two-photon conditional fringes move at twice the phase") {
    auto registry = full_registry();
    for (const double dphi : {0.0, 0.3, 1.2, 2.2, 4.4}) {
        const Ket recombined = recombined_emission(registry, dphi, 1);
        const double p = detection_probability(recombined, two_fold_spec("+-"));
        CHECK(p == doctest::Approx((1.0 - std::cos(2.0 * dphi)) / 4.0).epsilon(1e-12));
    }
}

TEST_CASE("four-fold patterns match the hand-derived amplitudes") {
    auto registry = full_registry();
    for (const double dphi : {0.0, 0.25, 0.9, 1.57, 3.3, 5.1}) {
        const Ket recombined = recombined_emission(registry, dphi);
        for (const auto& pattern : all_patterns(4)) {
            const double p = detection_probability(recombined, four_fold_spec(pattern));
            CHECK(p == doctest::Approx(four_fold_oracle(pattern, dphi)).epsilon(5e-12));
        }
    }
}

TEST_CASE("odd-parity projections give the pure quarter-wavelength fringe") {
    auto registry = full_registry();
    for (const double dphi : {0.1, 0.8, 2.3}) {
        const Ket recombined = recombined_emission(registry, dphi);
        const double expected = (1.0 - std::cos(4.0 * dphi)) / 32.0;
        CHECK(detection_probability(recombined, four_fold_spec("+-++")) ==
              doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("the all-plus projection mixes both harmonics") {
    auto registry = full_registry();
    for (const double dphi : {0.0, 0.45, 1.9, 3.7}) {
        const Ket recombined = recombined_emission(registry, dphi);
        const double c = std::cos(2.0 * dphi);
        CHECK(detection_probability(recombined, four_fold_spec("++++")) ==
              doctest::Approx((1.0 + c) * (1.0 + c) / 16.0).epsilon(1e-12));
    }
}

TEST_CASE("pattern distributions are complete for singly occupied ports") {
    auto registry = full_registry();
    for (const double dphi : {0.0, 0.6, 1.7, 2.9, 4.8}) {
        const Ket recombined = recombined_emission(registry, dphi);
        const auto distribution = pattern_distribution(recombined, kFourFold);
        CHECK(distribution.size() == 16);
        double sum = 0.0;
        for (const auto& [pattern, p] : distribution) sum += p;
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("pattern probabilities at reference phases") {
    auto registry = full_registry();
    SUBCASE("zero phase") {
        const auto distribution = pattern_distribution(recombined_emission(registry, 0.0),
                                                       kFourFold);
        CHECK(distribution.at("++++") == doctest::Approx(0.25).epsilon(1e-12));
        CHECK(distribution.at("+-++") == doctest::Approx(0.0).epsilon(1e-12));
    }
    SUBCASE("eighth-wave phase") {
        const auto distribution = pattern_distribution(recombined_emission(registry, kPi / 4.0),
                                                       kFourFold);
        for (const auto& pattern : all_patterns(4)) {
            if (odd_parity(pattern)) {
                CHECK(distribution.at(pattern) == doctest::Approx(1.0 / 16.0).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("parity decides which patterns stay pure") {
    auto registry = full_registry();
    auto state_at = [&](double dphi) { return recombined_emission(registry, dphi); };

    const auto pure = find_pure_projections(state_at, kFourFold, 4);
    CHECK(pure.size() == 8);
    for (const auto& pattern : pure) CHECK(odd_parity(pattern));
    CHECK(std::find(pure.begin(), pure.end(), "++++") == pure.end());

    // All eight odd-parity fringes are one and the same curve.
    for (const double dphi : {0.2, 1.3, 2.6}) {
        const Ket recombined = state_at(dphi);
        double lo = 1.0;
        double hi = 0.0;
        for (const auto& pattern : pure) {
            const double p = detection_probability(recombined, four_fold_spec(pattern));
            lo = std::min(lo, p);
            hi = std::max(hi, p);
        }
        CHECK(hi - lo < 1e-12);
    }
}

TEST_CASE("every two-photon projection is already pure") {
    auto registry = full_registry();
    auto state_at = [&](double dphi) { return recombined_emission(registry, dphi, 1); };
    const auto pure = find_pure_projections(state_at, kTwoFold, 2);
    CHECK(pure.size() == 4);
}

TEST_CASE("one-pair-each-side terms cancel under odd parity") {
    // The analogue of two-photon bunching: conditioned on one photon per
    // port, the component with one pair from each pass contributes nothing
    // to any odd-parity outcome.
    auto registry = full_registry();
    EmissionConfig cfg;
    const auto circuit = recombination(registry);
    for (const auto& component : emit_grouped(registry, cfg, phase_at(0.9))) {
        if (component.forward_pairs != 1 || component.backward_pairs != 1) continue;
        const Ket routed = apply_transform(component.ket, circuit);
        for (const auto& pattern : all_patterns(4)) {
            const double p = detection_probability(routed, four_fold_spec(pattern));
            if (odd_parity(pattern)) {
                CHECK(p == doctest::Approx(0.0).epsilon(1e-14));
            } else {
                CHECK(p > 0.01);
            }
        }
    }
}

TEST_CASE("conditional probabilities do not depend on the pair amplitude") {
    auto registry = full_registry();
    const auto circuit = recombination(registry);
    const double dphi = 1.1;
    double reference = -1.0;
    for (const double p : {0.001, 0.01, 0.2}) {
        EmissionConfig cfg;
        cfg.pair_amplitude = p;
        const Ket state = apply_transform(emit(registry, cfg, phase_at(dphi)), circuit);
        const double prob = detection_probability(state, four_fold_spec("+-++"));
        if (reference < 0.0) reference = prob;
        CHECK(prob == doctest::Approx(reference).epsilon(1e-12));
    }
}

TEST_CASE("aligned sources make both reflection conventions agree") {
    auto registry = full_registry();
    for (const double dphi : {0.0, 0.5, 1.4, 2.8}) {
        const Ket real_state =
            recombined_emission(registry, dphi, 2, PbsConvention::real_reflection);
        const Ket imag_state =
            recombined_emission(registry, dphi, 2, PbsConvention::imaginary_reflection);
        for (const auto& pattern : all_patterns(4)) {
            CHECK(detection_probability(real_state, four_fold_spec(pattern)) ==
                  doctest::Approx(detection_probability(imag_state, four_fold_spec(pattern)))
                      .epsilon(1e-12));
        }
        const Ket real_pairs =
            recombined_emission(registry, dphi, 1, PbsConvention::real_reflection);
        const Ket imag_pairs =
            recombined_emission(registry, dphi, 1, PbsConvention::imaginary_reflection);
        for (const auto& pattern : all_patterns(2)) {
            CHECK(detection_probability(real_pairs, two_fold_spec(pattern)) ==
                  doctest::Approx(detection_probability(imag_pairs, two_fold_spec(pattern)))
                      .epsilon(1e-12));
        }
    }
}

TEST_CASE("without realignment only the odd-parity fringes survive a convention flip") {
    // The double-pass components reflect twice, but the one-pair-each-side
    // terms reflect zero or four times: an i-convention PBS with an
    // unaligned source shifts the even-parity fringes by half a period while
    // the odd-parity ones (where those terms cancel) are untouched.
    auto registry = full_registry();
    EmissionConfig unaligned; // vv_pair_phase stays +1
    const double dphi = 0.7;
    const Ket state = apply_transform(
        emit(registry, unaligned, phase_at(dphi)),
        recombination(registry, PbsConvention::imaginary_reflection));

    CHECK(detection_probability(state, four_fold_spec("+-++")) ==
          doctest::Approx((1.0 - std::cos(4.0 * dphi)) / 32.0).epsilon(1e-12));
    const double c = std::cos(2.0 * dphi);
    CHECK(detection_probability(state, four_fold_spec("++++")) ==
          doctest::Approx((1.0 - c) * (1.0 - c) / 16.0).epsilon(1e-12));
}

TEST_CASE("visibility endpoints recover the coherent and washed-out fringes") {
    auto registry = full_registry();
    const double dphi = 0.9;
    const auto groups = recombined_groups(registry, dphi);
    const auto spec = four_fold_spec("+-++");

    const double coherent = detection_probability(groups, spec, {1.0});
    CHECK(coherent == doctest::Approx((1.0 - std::cos(4.0 * dphi)) / 32.0).epsilon(1e-12));

    // Fully distinguishable passes: the fringe flattens to its mean.
    for (const double phase : {0.0, 0.9, 2.1}) {
        const double flat =
            detection_probability(recombined_groups(registry, phase), spec, {0.0});
        CHECK(flat == doctest::Approx(1.0 / 32.0).epsilon(1e-12));
    }

    // Intermediate V mixes the two endpoint curves.
    const double incoherent = detection_probability(groups, spec, {0.0});
    const double v = 0.37;
    CHECK(detection_probability(groups, spec, {v}) ==
          doctest::Approx(v * coherent + (1.0 - v) * incoherent).epsilon(1e-12));
}

TEST_CASE("a single coherent ket rejects reduced visibility") {
    auto registry = full_registry();
    const Ket state = recombined_emission(registry, 0.4);
    CHECK_THROWS_AS(detection_probability(state, four_fold_spec("+-++"), {0.5}), ConfigError);
    CHECK_THROWS_AS(detection_probability(state, four_fold_spec("+-++"), {1.5}), ConfigError);
}

TEST_CASE("single photon recombined on a pbs fringes at the single-photon period") {
    auto registry = full_registry();
    const auto splitter = pbs(registry, "a1", "b1", "a3", "b3");
    const double inv_sqrt2 = std::numbers::sqrt2 / 2.0;
    for (const double dphi : {0.0, 0.7, 1.9, 3.6, 5.4}) {
        Ket state(registry);
        state.add_term(occupation(registry, {{{"a1", Polarization::H}, 1}}), inv_sqrt2);
        state.add_term(occupation(registry, {{{"b1", Polarization::V}, 1}}),
                       std::polar(inv_sqrt2, dphi));
        const Ket routed = apply_transform(state, splitter);

        DetectionSpec spec;
        spec.counts = {{"a3", 1}};
        spec.analyzers["a3"] = {AnalyzerSign::plus, kPi / 4.0};
        CHECK(detection_probability(routed, spec) ==
              doctest::Approx((1.0 + std::cos(dphi)) / 2.0).epsilon(1e-12));
        spec.analyzers["a3"].sign = AnalyzerSign::minus;
        CHECK(detection_probability(routed, spec) ==
              doctest::Approx((1.0 - std::cos(dphi)) / 2.0).epsilon(1e-12));
    }
}

TEST_CASE("noon input on an exit splitter: port statistics oscillate at N dphi") {
    auto registry = full_registry();
    const ModeId a{"a1", Polarization::H};
    const ModeId b{"b1", Polarization::H};
    const auto exit_bs = beamsplitter(registry, a, b, 0.5);
    for (const int n : {1, 2, 4}) {
        for (const double dphi : {0.0, 0.5, 1.3, 2.7}) {
            const Ket out = apply_transform(noon_state(registry, {n, a, b, dphi}), exit_bs);
            const double p_a = coincidence_probability(out, {{"a1", n}});
            const double p_b = coincidence_probability(out, {{"b1", n}});
            // Offset by the splitter convention; period and contrast exact.
            const double expected_a =
                std::pow(0.5, n) * (1.0 + std::cos(n * dphi + n * kPi / 2.0));
            CHECK(p_a == doctest::Approx(expected_a).epsilon(1e-10));
            if (n == 1) CHECK(p_a + p_b == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("detection specs validate analyzers against counts") {
    auto registry = full_registry();
    DetectionSpec spec;
    spec.analyzers["a3"] = {};
    CHECK_THROWS_AS(spec.validate(*registry), ConfigError);
    spec.counts = {{"a3", 0}};
    CHECK_THROWS_AS(spec.validate(*registry), ConfigError);
    spec.counts = {{"a3", 1}};
    CHECK_NOTHROW(spec.validate(*registry));
    CHECK_THROWS_AS(spec.with_pattern("++"), ConfigError);
    CHECK_THROWS_AS(spec.with_pattern("x"), ConfigError);
}
