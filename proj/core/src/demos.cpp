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

#include "noonsim/demos.hpp"

#include <fstream>

namespace noonsim::demos {

namespace {

// 0..790 nm of mirror travel = 0..1580 nm of optical path in 10 nm steps:
// two full single-photon periods, eight four-photon ones.
const SweepSpec kDemoSweep{0.0, 790.0, 159};

ExperimentConfig spdc_base(int max_pairs) {
    ExperimentConfig config;
    SpdcSource source;
    source.emission.max_pairs = max_pairs;
    config.source = source;
    config.circuit = {PbsElement{"a1", "b1", "a3", "b3"}, PbsElement{"a2", "b2", "a4", "b4"}};
    config.sweep = kDemoSweep;
    return config;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw RuntimeError("cannot open for writing: " + path.string());
    out << content;
}

} // namespace

std::vector<NamedConfig> fringe_set_configs() {
    std::vector<NamedConfig> configs;

    ExperimentConfig single;
    single.source = SinglePhotonMzSource{};
    single.circuit = {PbsElement{"a1", "b1", "a3", "b3"}};
    single.detection.counts = {{"a3", 1}};
    single.detection.analyzer_signs = {{"a3", AnalyzerSign::plus}};
    single.sweep = kDemoSweep;
    configs.push_back({"n1_single_photon", 1, std::move(single)});

    ExperimentConfig two = spdc_base(1);
    two.detection.counts = {{"a3", 1}, {"a4", 1}};
    two.detection.analyzer_signs = {{"a3", AnalyzerSign::plus}, {"a4", AnalyzerSign::minus}};
    configs.push_back({"n2_two_photon", 2, std::move(two)});

    ExperimentConfig four = spdc_base(2);
    four.detection.counts = {{"a3", 1}, {"a4", 1}, {"b3", 1}, {"b4", 1}};
    four.detection.analyzer_signs = {{"a3", AnalyzerSign::plus},
                                     {"a4", AnalyzerSign::minus},
                                     {"b3", AnalyzerSign::plus},
                                     {"b4", AnalyzerSign::plus}};
    configs.push_back({"n4_four_photon", 4, std::move(four)});
    return configs;
}

std::vector<NamedConfig> mixed_harmonic_configs() {
    std::vector<NamedConfig> configs;

    ExperimentConfig two = spdc_base(1);
    two.detection.counts = {{"a3", 1}, {"a4", 1}};
    two.detection.analyzer_signs = {{"a3", AnalyzerSign::plus}, {"a4", AnalyzerSign::plus}};
    configs.push_back({"two_fold_plus_plus", 2, std::move(two)});

    ExperimentConfig four = spdc_base(2);
    four.detection.counts = {{"a3", 1}, {"a4", 1}, {"b3", 1}, {"b4", 1}};
    four.detection.analyzer_signs = {{"a3", AnalyzerSign::plus},
                                     {"a4", AnalyzerSign::plus},
                                     {"b3", AnalyzerSign::plus},
                                     {"b4", AnalyzerSign::plus}};
    configs.push_back({"four_fold_all_plus", 4, std::move(four)});
    return configs;
}

DemoResult run_demo(const std::string& figure, const std::filesystem::path& out_dir) {
    if (figure != "fig3" && figure != "fig4") {
        throw ConfigError("unknown demo figure \"" + figure + "\" (expected fig3 or fig4)");
    }
    std::filesystem::create_directories(out_dir);

    const auto configs = figure == "fig3" ? fringe_set_configs() : mixed_harmonic_configs();
    DemoResult result;
    std::vector<std::pair<int, FringeSeries>> curves;
    nlohmann::json hashes;

    for (const auto& named : configs) {
        const auto series = run_sweep(named.config);
        const auto csv_path = out_dir / (figure + "_" + named.name + ".csv");
        write_series(series.front(), csv_path);
        result.files.push_back(csv_path);

        const auto config_path = out_dir / (figure + "_" + named.name + ".config.json");
        write_text_file(config_path, named.config.to_json().dump(2) + "\n");
        result.files.push_back(config_path);

        hashes[named.name] = named.config.hash();
        curves.emplace_back(named.photons, series.front());
    }

    if (figure == "fig3") {
        std::vector<DeBroglieEntry> entries;
        for (const auto& [photons, series] : curves) {
            entries.push_back({photons, fit_cosine(series)});
        }
        const DeBroglieReport report = debroglie_report(entries);
        result.report = report.to_json();
        result.report["config_hashes"] = hashes;

        const auto json_path = out_dir / "fig3_debroglie.json";
        write_text_file(json_path, result.report.dump(2) + "\n");
        result.files.push_back(json_path);
        const auto text_path = out_dir / "fig3_debroglie.txt";
        write_text_file(text_path, report.text());
        result.files.push_back(text_path);
    } else {
        // Weigh the half- and quarter-wavelength lines of the four-fold curve.
        const double lambda = configs.back().config.lambda_single_nm;
        const std::vector<double> harmonics{lambda / 2.0, lambda / 4.0};
        const auto weights = harmonic_amplitudes(curves.back().second, harmonics);
        result.report = {{"two_photon_harmonic_amplitude", weights[0]},
                         {"four_photon_harmonic_amplitude", weights[1]},
                         {"weight_ratio", weights[0] / weights[1]},
                         {"config_hashes", hashes}};
        const auto json_path = out_dir / "fig4_harmonics.json";
        write_text_file(json_path, result.report.dump(2) + "\n");
        result.files.push_back(json_path);
    }
    return result;
}

} // namespace noonsim::demos
