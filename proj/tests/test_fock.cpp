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

#include <cmath>
#include <random>

#include "noonsim/fock.hpp"

using namespace noonsim;

namespace {

RegistryPtr two_mode_registry() {
    auto registry = std::make_shared<ModeRegistry>();
    registry->add({"a1", Polarization::H});
    registry->add({"b1", Polarization::H});
    return registry;
}

RegistryPtr pair_registry() {
    auto registry = std::make_shared<ModeRegistry>();
    registry->add_spatial("a1");
    registry->add_spatial("a2");
    return registry;
}

Ket random_ket(const RegistryPtr& registry, std::mt19937_64& rng, int max_terms = 5,
               int max_photons = 3) {
    std::uniform_int_distribution<int> occ(0, max_photons);
    std::uniform_real_distribution<double> amp(-1.0, 1.0);
    Ket ket(registry);
    for (int t = 0; t < max_terms; ++t) {
        FockBasisState state(registry->size());
        int budget = max_photons;
        for (std::size_t m = 0; m < registry->size() && budget > 0; ++m) {
            const int n = std::min(budget, occ(rng) % 2 == 0 ? 0 : occ(rng));
            if (n > 0) state.add(m, n);
            budget -= n;
        }
        ket.add_term(state, {amp(rng), amp(rng)});
    }
    ket.prune();
    return ket;
}

} // namespace

TEST_CASE("registry indices are append-only and queryable") {
    ModeRegistry registry;
    CHECK(registry.add({"a1", Polarization::H}) == 0);
    CHECK(registry.add({"a1", Polarization::V}) == 1);
    CHECK(registry.add({"a1", Polarization::H}) == 0); // re-registration keeps the index
    registry.add_spatial("b1");
    CHECK(registry.size() == 4);
    CHECK(registry.index_of({"b1", Polarization::V}) == 3);
    CHECK(registry.spatial_indices("a1") == std::vector<std::size_t>{0, 1});
    CHECK_THROWS_AS(registry.index_of({"c9", Polarization::H}), ConfigError);
}

TEST_CASE("single creation operator makes a one-photon state") {
    auto registry = two_mode_registry();
    const Ket vac = Ket::vacuum(registry);
    CreationMonomial a{1.0, {{{"a1", Polarization::H}, 1}}};
    const Ket one = apply_monomial(vac, a);

    FockBasisState expected(registry->size());
    expected.add(0, 1);
    CHECK(one.num_terms() == 1);
    CHECK(one.amplitude(expected).real() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("double creation picks up the sqrt(2) ladder factor") {
    auto registry = two_mode_registry();
    const Ket vac = Ket::vacuum(registry);
    CreationMonomial a_squared{1.0, {{{"a1", Polarization::H}, 2}}};
    const Ket two = apply_monomial(vac, a_squared);

    FockBasisState expected(registry->size());
    expected.add(0, 2);
    CHECK(two.num_terms() == 1);
    CHECK(two.amplitude(expected).real() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
}

TEST_CASE("independent modes get unit amplitude") {
    auto registry = pair_registry();
    const Ket vac = Ket::vacuum(registry);
    CreationMonomial hv{1.0, {{{"a1", Polarization::H}, 1}, {{"a2", Polarization::V}, 1}}};
    const Ket state = apply_monomial(vac, hv);

    FockBasisState expected(registry->size());
    expected.add(registry->index_of({"a1", Polarization::H}), 1);
    expected.add(registry->index_of({"a2", Polarization::V}), 1);
    CHECK(state.amplitude(expected).real() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("apply_monomial rejects unregistered modes") {
    auto registry = two_mode_registry();
    const Ket vac = Ket::vacuum(registry);
    CreationMonomial bad{1.0, {{{"nope", Polarization::H}, 1}}};
    CHECK_THROWS_AS(apply_monomial(vac, bad), ConfigError);
}

TEST_CASE("inner products on the orthonormal basis") {
    auto registry = pair_registry();
    const Ket vac = Ket::vacuum(registry);
    CHECK(inner_product(vac, vac).real() == doctest::Approx(1.0));

    CreationMonomial a_squared{1.0, {{{"a1", Polarization::H}, 2}}};
    const Ket two = apply_monomial(vac, a_squared); // sqrt(2) |2>
    Ket bare_two(registry);
    FockBasisState basis(registry->size());
    basis.add(0, 2);
    bare_two.add_term(basis, 1.0);
    CHECK(inner_product(bare_two, two).real() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
}

TEST_CASE("the polarization-correlated pair state is normalized") {
    auto registry = pair_registry();
    const Ket vac = Ket::vacuum(registry);
    const Complex amp{std::numbers::sqrt2 / 2.0};
    CreationMonomial hh{amp, {{{"a1", Polarization::H}, 1}, {{"a2", Polarization::H}, 1}}};
    CreationMonomial vv{amp, {{{"a1", Polarization::V}, 1}, {{"a2", Polarization::V}, 1}}};
    const Ket pair = apply_polynomial(vac, CreationPolynomial{hh, vv});
    CHECK(inner_product(pair, pair).real() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("inner product requires a shared registry") {
    const Ket x = Ket::vacuum(two_mode_registry());
    const Ket y = Ket::vacuum(two_mode_registry());
    CHECK_THROWS_AS(inner_product(x, y), ConfigError);
}

TEST_CASE("normalize scales direction-preservingly") {
    auto registry = two_mode_registry();
    Ket ket(registry);
    FockBasisState zero(registry->size());
    FockBasisState one(registry->size());
    one.add(0, 1);
    ket.add_term(zero, 2.0);
    ket.add_term(one, 2.0);

    const Ket unit = normalize(ket);
    CHECK(unit.norm() == doctest::Approx(1.0).epsilon(1e-12));
    const double expected = std::numbers::sqrt2 / 2.0;
    CHECK(unit.amplitude(zero).real() == doctest::Approx(expected).epsilon(1e-12));
    CHECK(unit.amplitude(one).real() == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("normalizing four orthogonal unit terms gives quarter weights") {
    auto registry = pair_registry();
    Ket ket(registry);
    for (std::size_t m = 0; m < 4; ++m) {
        FockBasisState state(registry->size());
        state.add(m, 1);
        ket.add_term(state, 1.0);
    }
    const Ket unit = normalize(ket);
    for (const auto& [state, amp] : unit.terms()) {
        CHECK(amp.real() == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(amp.imag() == doctest::Approx(0.0).epsilon(1e-14));
    }
}

TEST_CASE("normalize rejects the zero ket") {
    const Ket empty{two_mode_registry()};
    CHECK_THROWS_AS(normalize(empty), RuntimeError);
}

TEST_CASE("photon-number grading under monomials") {
    auto registry = pair_registry();
    std::mt19937_64 rng(7);
    CreationMonomial m{0.8, {{{"a1", Polarization::V}, 2}, {{"a2", Polarization::H}, 1}}};
    for (int trial = 0; trial < 20; ++trial) {
        const Ket ket = random_ket(registry, rng);
        if (ket.empty()) continue;
        const int before = ket.terms().begin()->first.total_photons();
        const Ket raised = apply_monomial(photon_number_sector(ket, before), m);
        for (const auto& [state, amp] : raised.terms()) {
            CHECK(state.total_photons() == before + 3);
        }
    }
}

TEST_CASE("apply_monomial is linear") {
    auto registry = pair_registry();
    std::mt19937_64 rng(11);
    CreationMonomial m{{0.3, -0.2}, {{{"a1", Polarization::H}, 1}}};
    for (int trial = 0; trial < 20; ++trial) {
        const Ket x = random_ket(registry, rng);
        const Ket y = random_ket(registry, rng);
        const Complex alpha{0.4, 0.9};
        const Complex beta{-1.1, 0.3};

        const Ket combined = apply_monomial(alpha * x + beta * y, m);
        const Ket separate = alpha * apply_monomial(x, m) + beta * apply_monomial(y, m);

        Ket difference = combined + Complex{-1.0} * separate;
        CHECK(difference.norm() < 1e-12);
    }
}

TEST_CASE("operations never retain sub-threshold amplitudes") {
    auto registry = two_mode_registry();
    Ket ket(registry);
    FockBasisState zero(registry->size());
    ket.add_term(zero, 1e-20);
    ket.prune();
    CHECK(ket.empty());

    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 10; ++trial) {
        Ket x = random_ket(registry, rng);
        x *= Complex{1e-10};
        for (const auto& [state, amp] : x.terms()) {
            CHECK(std::abs(amp) >= kAmplitudeEpsilon);
        }
    }
}

TEST_CASE("debug serialization is stable") {
    auto registry = pair_registry();
    Ket ket(registry);
    FockBasisState hh(registry->size());
    hh.add(0, 1);
    hh.add(2, 1);
    FockBasisState vv(registry->size());
    vv.add(1, 1);
    vv.add(3, 1);
    ket.add_term(hh, {0.5, 0.0});
    ket.add_term(vv, {0.0, -0.25});

    // Terms are ordered lexicographically by occupation vector.
    CHECK(ket.debug_string() == "0 -0.25 : 0 1 0 1\n0.5 0 : 1 0 1 0\n");
}

TEST_CASE("kets written before a registry grows stay usable") {
    auto registry = std::make_shared<ModeRegistry>();
    registry->add_spatial("a1");
    auto frozen = RegistryPtr(registry);
    Ket ket = Ket::vacuum(frozen);
    registry->add_spatial("b7");

    FockBasisState one(frozen->size());
    one.add(2, 1);
    ket.add_term(one, 0.5);
    CHECK(ket.norm_squared() == doctest::Approx(1.25));
}
