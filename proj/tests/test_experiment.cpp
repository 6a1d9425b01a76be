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
#include <numbers>
#include <sstream>

#include "noonsim/experiment.hpp"

using namespace noonsim;

namespace {

constexpr double kPi = std::numbers::pi;

ExperimentConfig four_photon_config() {
    ExperimentConfig config;
    SpdcSource source;
    source.emission.max_pairs = 2;
    config.source = source;
    config.circuit = {PbsElement{"a1", "b1", "a3", "b3"}, PbsElement{"a2", "b2", "a4", "b4"}};
    config.detection.counts = {{"a3", 1}, {"a4", 1}, {"b3", 1}, {"b4", 1}};
    config.detection.analyzer_signs = {{"a3", AnalyzerSign::plus},
                                       {"a4", AnalyzerSign::minus},
                                       {"b3", AnalyzerSign::plus},
                                       {"b4", AnalyzerSign::plus}};
    return config;
}

} // namespace

TEST_CASE("four-photon sweep produces two full quarter-wavelength fringes") {
    ExperimentConfig config = four_photon_config();
    config.sweep = {0.0, 197.5, 80};
    const auto series = run_sweep(config);
    REQUIRE(series.size() == 1);
    REQUIRE(series.front().points.size() == 80);
    CHECK(series.front().pattern == "+-++");

    for (const auto& point : series.front().points) {
        // Optical path axis: ds = 2 dx, one fringe every 197.5 nm.
        const double expected =
            (1.0 - std::cos(2.0 * kPi * point.optical_path_nm / 197.5)) / 32.0;
        CHECK(point.probability == doctest::Approx(expected).epsilon(1e-9));
    }
    CHECK(series.front().points.front().optical_path_nm == 0.0);
    CHECK(series.front().points.back().optical_path_nm == doctest::Approx(395.0));
}

TEST_CASE("two-photon sweep fringes at half the single-photon wavelength") {
    ExperimentConfig config = four_photon_config();
    std::get<SpdcSource>(config.source).emission.max_pairs = 1;
    config.detection.counts = {{"a3", 1}, {"a4", 1}};
    config.detection.analyzer_signs = {{"a3", AnalyzerSign::plus}, {"a4", AnalyzerSign::minus}};
    config.sweep = {0.0, 395.0, 81};
    const auto series = run_sweep(config);
    for (const auto& point : series.front().points) {
        const double expected = (1.0 - std::cos(2.0 * kPi * point.optical_path_nm / 395.0)) / 4.0;
        CHECK(point.probability == doctest::Approx(expected).epsilon(1e-9));
    }
}

TEST_CASE("the single-photon configuration fringes at the full wavelength") {
    ExperimentConfig config;
    config.source = SinglePhotonMzSource{};
    config.circuit = {PbsElement{"a1", "b1", "a3", "b3"}};
    config.detection.counts = {{"a3", 1}};
    config.detection.analyzer_signs = {{"a3", AnalyzerSign::plus}};
    config.sweep = {0.0, 790.0, 81};
    const auto series = run_sweep(config);
    for (const auto& point : series.front().points) {
        const double expected = (1.0 + std::cos(2.0 * kPi * point.optical_path_nm / 790.0)) / 2.0;
        CHECK(point.probability == doctest::Approx(expected).epsilon(1e-9));
    }
}

TEST_CASE("a four-fold detection never sees the single-pair sector") {
    ExperimentConfig config = four_photon_config();
    std::get<SpdcSource>(config.source).emission.max_pairs = 1;
    config.sweep = {0.0, 100.0, 11};
    for (const auto& series : run_sweep(config)) {
        for (const auto& point : series.points) CHECK(point.probability == 0.0);
    }
}

TEST_CASE("multiple patterns come back as separate ordered series") {
    ExperimentConfig config = four_photon_config();
    config.detection.patterns = {"+-++", "++++"};
    config.sweep = {0.0, 100.0, 9};
    const auto series = run_sweep(config);
    REQUIRE(series.size() == 2);
    CHECK(series[0].pattern == "+-++");
    CHECK(series[1].pattern == "++++");
    for (const auto& s : series) {
        for (std::size_t i = 1; i < s.points.size(); ++i) {
            CHECK(s.points[i].optical_path_nm > s.points[i - 1].optical_path_nm);
        }
        CHECK(s.config_hash == config.hash());
    }
}

TEST_CASE("noon sweeps oscillate at the N-th fraction of the wavelength") {
    ExperimentConfig config;
    config.source = NoonSource{4};
    config.circuit = {BsElement{{"a1", Polarization::H}, {"b1", Polarization::H}, 0.5}};
    config.detection.counts = {{"a1", 4}};
    config.sweep = {0.0, 197.5, 41};
    const auto series = run_sweep(config);
    for (const auto& point : series.front().points) {
        const double dphi = 2.0 * kPi * point.optical_path_nm / 790.0;
        const double expected = (1.0 + std::cos(4.0 * dphi + 2.0 * kPi)) / 16.0;
        CHECK(point.probability == doctest::Approx(expected).epsilon(1e-9));
    }
}

TEST_CASE("reduced visibility scales the fringe contrast") {
    ExperimentConfig config = four_photon_config();
    config.sweep = {0.0, 98.75, 21};
    config.visibility = 0.5;
    const auto series = run_sweep(config);
    for (const auto& point : series.front().points) {
        const double coherent =
            (1.0 - std::cos(2.0 * kPi * point.optical_path_nm / 197.5)) / 32.0;
        const double expected = 0.5 * coherent + 0.5 / 32.0;
        CHECK(point.probability == doctest::Approx(expected).epsilon(1e-9));
    }
}

TEST_CASE("config validation names the offending field") {
    ExperimentConfig config = four_photon_config();
    config.sweep.steps = 1;
    CHECK_THROWS_WITH_AS(config.validate(), doctest::Contains("sweep.steps"), ConfigError);

    config = four_photon_config();
    config.sweep = {100.0, 50.0, 10};
    CHECK_THROWS_WITH_AS(config.validate(), doctest::Contains("stop_mirror_nm"), ConfigError);

    config = four_photon_config();
    config.visibility = 1.5;
    CHECK_THROWS_WITH_AS(config.validate(), doctest::Contains("visibility"), ConfigError);

    config = four_photon_config();
    config.detection.counts = {{"z9", 1}};
    config.detection.analyzer_signs = {};
    CHECK_THROWS_WITH_AS(run_sweep(config), doctest::Contains("z9"), ConfigError);

    nlohmann::json j = four_photon_config().to_json();
    j.erase("sweep");
    CHECK_THROWS_WITH_AS(ExperimentConfig::from_json(j), doctest::Contains("sweep"), ConfigError);
}

TEST_CASE("config json round-trips to the same hash") {
    const ExperimentConfig config = four_photon_config();
    const ExperimentConfig reparsed = ExperimentConfig::from_json(config.to_json());
    CHECK(config.hash() == reparsed.hash());
    CHECK(config.hash().size() == 16);
}

TEST_CASE("sampling is deterministic and respects zero probability") {
    FringeSeries series;
    for (int i = 0; i < 50; ++i) {
        series.points.push_back({static_cast<double>(i), 0.0, std::nullopt});
    }
    const FringeSeries zeros = sample_counts(series, 1000, 7);
    for (const auto& point : zeros.points) CHECK(*point.counts == 0);

    for (auto& point : series.points) point.probability = 0.5;
    const FringeSeries a = sample_counts(series, 10000, 123);
    const FringeSeries b = sample_counts(series, 10000, 123);
    CHECK(a == b);
    const FringeSeries c = sample_counts(series, 10000, 124);
    CHECK(a != c);

    CHECK_THROWS_AS(sample_counts(series, 0, 1), ConfigError);
}

TEST_CASE("poisson samples stay within three sigma almost always") {
    FringeSeries series;
    series.points.push_back({0.0, 0.5, std::nullopt});
    const double mean = 5000.0;
    const double three_sigma = 3.0 * std::sqrt(mean);
    int within = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto sampled = sample_counts(series, 10000, seed);
        if (std::abs(static_cast<double>(*sampled.points[0].counts) - mean) <= three_sigma) {
            ++within;
        }
    }
    CHECK(within >= 99);
}

TEST_CASE("csv round-trip preserves every digit") {
    FringeSeries series;
    series.pattern = "+-++";
    series.config_hash = "0123456789abcdef";
    series.points = {{0.0, 1.0 / 3.0, std::nullopt},
                     {5.0, 0.12345678901234567, std::nullopt},
                     {10.0, 1e-17, std::nullopt}};

    std::stringstream io;
    write_series(series, io);
    const FringeSeries back = read_series(io, "buffer");
    CHECK(back == series);
}

TEST_CASE("csv carries counts only when sampled") {
    FringeSeries series;
    series.points = {{0.0, 0.25, std::nullopt}, {1.0, 0.5, std::nullopt}};
    std::stringstream plain;
    write_series(series, plain);
    CHECK(plain.str().find("counts") == std::string::npos);

    const FringeSeries sampled = sample_counts(series, 100, 5);
    std::stringstream with_counts;
    write_series(sampled, with_counts);
    CHECK(with_counts.str().find("optical_path_nm,probability,counts") != std::string::npos);
    const FringeSeries back = read_series(with_counts, "buffer");
    CHECK(back == sampled);
}

TEST_CASE("an empty series writes only the header") {
    FringeSeries series;
    std::stringstream io;
    write_series(series, io);
    CHECK(io.str() == "optical_path_nm,probability\n");
    CHECK(read_series(io, "buffer").points.empty());
}

TEST_CASE("csv parse errors carry the line number") {
    std::stringstream bad("optical_path_nm,probability\n0,0.5\nfive,0.2\n");
    CHECK_THROWS_WITH_AS(read_series(bad, "bad.csv"), doctest::Contains("bad.csv:3"), ParseError);

    std::stringstream decreasing("optical_path_nm,probability\n5,0.5\n1,0.2\n");
    CHECK_THROWS_WITH_AS(read_series(decreasing, "d.csv"), doctest::Contains("d.csv:3"),
                         ParseError);

    std::stringstream no_header("0,0.5\n");
    CHECK_THROWS_AS(read_series(no_header, "h.csv"), ParseError);
}

TEST_CASE("summaries report the probability range and the rate estimate") {
    ExperimentConfig config = four_photon_config();
    config.sweep = {0.0, 98.75, 33}; // half a fringe: min 0, max 1/16
    config.rates = RateModel{76.0e6, 0.2};
    const auto series = run_sweep(config);
    const nlohmann::json summary = summarize_series(series.front(), config);

    CHECK(summary.at("points") == 33);
    CHECK(summary.at("min_probability").get<double>() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(summary.at("max_probability").get<double>() == doctest::Approx(1.0 / 16.0));
    // rep rate * p^2 * eta^4 * P at the fringe top
    const double scale = 76.0e6 * 1e-4 * std::pow(0.2, 4);
    CHECK(summary.at("expected_rate_hz").at("max").get<double>() ==
          doctest::Approx(scale / 16.0).epsilon(1e-9));
}

TEST_CASE("thread cap obeys the environment variable") {
    setenv("NOON_SIM_THREADS", "3", 1);
    CHECK(sweep_thread_cap() == 3);
    setenv("NOON_SIM_THREADS", "junk", 1);
    CHECK(sweep_thread_cap() >= 1);
    unsetenv("NOON_SIM_THREADS");
    CHECK(sweep_thread_cap() >= 1);
}
