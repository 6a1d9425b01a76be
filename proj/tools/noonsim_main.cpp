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

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "noonsim/analysis.hpp"
#include "noonsim/demos.hpp"
#include "noonsim/experiment.hpp"

namespace fs = std::filesystem;
using namespace noonsim;

namespace {

void write_text_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw RuntimeError("cannot open for writing: " + path.string());
    out << content;
}

/// Runs a prepared config: sweep, optional sampling, CSV + summary output.
void execute_config(const ExperimentConfig& config, const fs::path& out_dir,
                    const std::string& stem) {
    fs::create_directories(out_dir);
    auto series_list = run_sweep(config);

    nlohmann::json summary;
    summary["config_hash"] = config.hash();
    summary["series"] = nlohmann::json::array();
    std::vector<fs::path> written;

    for (std::size_t i = 0; i < series_list.size(); ++i) {
        FringeSeries series = series_list[i];
        if (config.sampling) {
            series = sample_counts(series, config.sampling->shots_per_point,
                                   config.rng_seed + i);
        }
        std::string name = stem;
        if (!series.pattern.empty()) name += "_" + series.pattern;
        const fs::path csv_path = out_dir / (name + ".csv");
        write_series(series, csv_path);
        written.push_back(csv_path);

        nlohmann::json entry = summarize_series(series, config);
        entry["csv"] = csv_path.filename().string();
        summary["series"].push_back(std::move(entry));
    }

    const fs::path summary_path = out_dir / (stem + "_summary.json");
    write_text_file(summary_path, summary.dump(2) + "\n");
    written.push_back(summary_path);

    for (const auto& path : written) std::cout << "wrote " << path.string() << '\n';
}

struct ReportItem {
    int photons = 0;
    std::string path;
};

ReportItem parse_report_item(const std::string& arg) {
    const auto eq = arg.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == arg.size()) {
        throw ConfigError("report arguments look like N=series.csv, got \"" + arg + "\"");
    }
    ReportItem item;
    try {
        item.photons = std::stoi(arg.substr(0, eq));
    } catch (const std::exception&) {
        throw ConfigError("bad photon number in \"" + arg + "\"");
    }
    if (item.photons < 1) throw ConfigError("photon number must be at least 1");
    item.path = arg.substr(eq + 1);
    return item;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact linear-optics simulator of multiphoton fringe experiments:\n"
                 "double-pass pair source, PBS recombination, coincidence post-selection,\n"
                 "and fringe-wavelength analysis."};
    app.require_subcommand(1);
    std::function<void()> action;

    // run
    auto* run_cmd = app.add_subcommand("run", "Run an experiment config (JSON)");
    std::string run_config_path;
    std::string run_out = ".";
    std::optional<std::uint64_t> run_seed;
    run_cmd->add_option("config", run_config_path, "Path to the experiment config")->required();
    run_cmd->add_option("--out", run_out, "Output directory");
    run_cmd->add_option("--seed", run_seed, "Override the config's rng_seed");
    run_cmd->callback([&] {
        action = [&] {
            ExperimentConfig config = ExperimentConfig::from_file(run_config_path);
            if (run_seed) config.rng_seed = *run_seed;
            execute_config(config, run_out, fs::path(run_config_path).stem().string());
        };
    });

    // sweep
    auto* sweep_cmd = app.add_subcommand("sweep", "Run a flag-built sweep without a config file");
    std::string sweep_source = "spdc";
    std::string sweep_pattern = "+-++";
    int sweep_photons = 1;
    int sweep_max_pairs = 2;
    double sweep_start = 0.0;
    double sweep_stop = 400.0;
    int sweep_steps = 161;
    double sweep_visibility = 1.0;
    std::optional<std::int64_t> sweep_shots;
    std::uint64_t sweep_seed = 0;
    std::string sweep_out = ".";
    std::string sweep_name = "sweep";
    sweep_cmd->add_option("--source", sweep_source, "spdc, noon or mz")
        ->check(CLI::IsMember({"spdc", "noon", "mz"}));
    sweep_cmd->add_option("--pattern", sweep_pattern,
                          "Analyzer sign pattern (2-fold \"+-\" or 4-fold \"+-++\", spdc only)");
    sweep_cmd->add_option("--photons", sweep_photons, "Photon number (noon source)");
    sweep_cmd->add_option("--max-pairs", sweep_max_pairs, "Emission truncation (spdc source)");
    sweep_cmd->add_option("--start", sweep_start, "Mirror start position, nm");
    sweep_cmd->add_option("--stop", sweep_stop, "Mirror stop position, nm");
    sweep_cmd->add_option("--steps", sweep_steps, "Sweep points (inclusive endpoints)");
    sweep_cmd->add_option("--visibility", sweep_visibility, "Origin-interference visibility V");
    sweep_cmd->add_option("--shots", sweep_shots, "Poisson-sample counts at this many shots/point");
    sweep_cmd->add_option("--seed", sweep_seed, "Sampling seed");
    sweep_cmd->add_option("--out", sweep_out, "Output directory");
    sweep_cmd->add_option("--name", sweep_name, "Output file stem");
    sweep_cmd->callback([&] {
        action = [&] {
            ExperimentConfig config;
            config.sweep = {sweep_start, sweep_stop, sweep_steps};
            config.visibility = sweep_visibility;
            config.rng_seed = sweep_seed;
            if (sweep_shots) config.sampling = SamplingSpec{*sweep_shots};

            if (sweep_source == "spdc") {
                SpdcSource source;
                source.emission.max_pairs = sweep_max_pairs;
                config.source = source;
                config.circuit = {PbsElement{"a1", "b1", "a3", "b3"},
                                  PbsElement{"a2", "b2", "a4", "b4"}};
                const std::vector<std::string> labels =
                    sweep_pattern.size() == 2 ? std::vector<std::string>{"a3", "a4"}
                                              : std::vector<std::string>{"a3", "a4", "b3", "b4"};
                if (sweep_pattern.size() != labels.size()) {
                    throw ConfigError("--pattern must have 2 or 4 signs");
                }
                for (std::size_t i = 0; i < labels.size(); ++i) {
                    const char c = sweep_pattern[i];
                    if (c != '+' && c != '-') throw ConfigError("--pattern uses only + and -");
                    config.detection.counts[labels[i]] = 1;
                    config.detection.analyzer_signs[labels[i]] =
                        c == '+' ? AnalyzerSign::plus : AnalyzerSign::minus;
                }
            } else if (sweep_source == "noon") {
                config.source = NoonSource{sweep_photons};
                config.circuit = {BsElement{{"a1", Polarization::H}, {"b1", Polarization::H}, 0.5}};
                config.detection.counts = {{"a1", sweep_photons}};
            } else {
                config.source = SinglePhotonMzSource{};
                config.circuit = {PbsElement{"a1", "b1", "a3", "b3"}};
                config.detection.counts = {{"a3", 1}};
                config.detection.analyzer_signs = {{"a3", AnalyzerSign::plus}};
            }
            execute_config(config, sweep_out, sweep_name);
        };
    });

    // fit
    auto* fit_cmd = app.add_subcommand("fit", "Fit offset + amplitude * cos(k x + phase) to a CSV");
    std::string fit_csv;
    std::optional<double> fit_hint;
    std::string fit_dump;
    fit_cmd->add_option("csv", fit_csv, "Fringe series CSV")->required();
    fit_cmd->add_option("--lambda-hint", fit_hint, "Initial wavelength guess, nm");
    fit_cmd->add_option("--dump", fit_dump, "Write a two-column x/y dump of the fitted curve");
    fit_cmd->callback([&] {
        action = [&] {
            const FringeSeries series = read_series(fit_csv);
            const FitResult fit = fit_cosine(series, fit_hint);
            std::cout << fit.text();
            std::cout << fit.to_json().dump(2) << '\n';
            if (!fit_dump.empty()) {
                std::ofstream out(fit_dump);
                if (!out) throw RuntimeError("cannot open for writing: " + fit_dump);
                for (const auto& point : series.points) {
                    char buf[80];
                    std::snprintf(buf, sizeof(buf), "%.17g %.17g\n", point.optical_path_nm,
                                  fit.evaluate(point.optical_path_nm));
                    out << buf;
                }
            }
        };
    });

    // report
    auto* report_cmd =
        app.add_subcommand("report", "De Broglie wavelength table from fitted series");
    std::vector<std::string> report_args;
    std::string report_json_out;
    report_cmd->add_option("series", report_args, "Entries like 1=single.csv 2=two.csv 4=four.csv")
        ->required()
        ->expected(-1);
    report_cmd->add_option("--json-out", report_json_out, "Also write the report as JSON");
    report_cmd->callback([&] {
        action = [&] {
            std::vector<DeBroglieEntry> entries;
            for (const auto& arg : report_args) {
                const ReportItem item = parse_report_item(arg);
                entries.push_back({item.photons, fit_cosine(read_series(item.path))});
            }
            const DeBroglieReport report = debroglie_report(entries);
            std::cout << report.text();
            if (!report_json_out.empty()) {
                write_text_file(report_json_out, report.to_json().dump(2) + "\n");
            }
        };
    });

    // demo
    auto* demo_cmd = app.add_subcommand("demo", "Reproduce a bundled demonstration data set");
    std::string demo_figure;
    std::string demo_out = "demo_out";
    demo_cmd->add_option("figure", demo_figure, "fig3 (pure fringes) or fig4 (mixed harmonics)")
        ->required();
    demo_cmd->add_option("--out", demo_out, "Output directory");
    demo_cmd->callback([&] {
        action = [&] {
            const auto result = demos::run_demo(demo_figure, demo_out);
            for (const auto& file : result.files) std::cout << "wrote " << file.string() << '\n';
            if (!result.report.is_null()) std::cout << result.report.dump(2) << '\n';
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        action();
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
