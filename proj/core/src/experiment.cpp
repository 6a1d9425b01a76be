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

#include "noonsim/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include "noonsim/elements.hpp"

namespace noonsim {

namespace {

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

const nlohmann::json& require_field(const nlohmann::json& j, const char* key,
                                    const std::string& context) {
    if (!j.is_object() || !j.contains(key)) {
        throw ConfigError(context + ": missing required field \"" + key + "\"");
    }
    return j.at(key);
}

double as_number(const nlohmann::json& j, const std::string& context) {
    if (!j.is_number()) throw ConfigError(context + ": expected a number");
    return j.get<double>();
}

double number_field(const nlohmann::json& j, const char* key, const std::string& context) {
    return as_number(require_field(j, key, context), context + "." + key);
}

double number_field_or(const nlohmann::json& j, const char* key, const std::string& context,
                       double fallback) {
    if (!j.is_object() || !j.contains(key)) return fallback;
    return as_number(j.at(key), context + "." + key);
}

int int_field(const nlohmann::json& j, const char* key, const std::string& context) {
    const auto& v = require_field(j, key, context);
    if (!v.is_number_integer()) throw ConfigError(context + "." + key + ": expected an integer");
    return v.get<int>();
}

std::string string_field(const nlohmann::json& j, const char* key, const std::string& context) {
    const auto& v = require_field(j, key, context);
    if (!v.is_string()) throw ConfigError(context + "." + key + ": expected a string");
    return v.get<std::string>();
}

ModeId parse_mode(const std::string& text, const std::string& context) {
    const auto sep = text.rfind('_');
    if (sep == std::string::npos || sep + 2 != text.size() ||
        (text[sep + 1] != 'H' && text[sep + 1] != 'V')) {
        throw ConfigError(context + ": mode \"" + text + "\" must look like \"a1_H\" or \"a1_V\"");
    }
    return ModeId{text.substr(0, sep),
                  text[sep + 1] == 'H' ? Polarization::H : Polarization::V};
}

SourceConfig parse_source(const nlohmann::json& j) {
    const std::string type = string_field(j, "type", "source");
    if (type == "spdc") {
        SpdcSource src;
        src.emission.pair_amplitude =
            number_field_or(j, "pair_amplitude", "source", src.emission.pair_amplitude);
        if (j.contains("max_pairs")) src.emission.max_pairs = int_field(j, "max_pairs", "source");
        auto read_modes = [&](const char* key, std::array<std::string, 2>& out) {
            if (!j.contains(key)) return;
            const auto& arr = j.at(key);
            if (!arr.is_array() || arr.size() != 2 || !arr[0].is_string() || !arr[1].is_string()) {
                throw ConfigError(std::string("source.") + key +
                                  ": expected an array of two spatial labels");
            }
            out = {arr[0].get<std::string>(), arr[1].get<std::string>()};
        };
        read_modes("forward_modes", src.emission.forward_modes);
        read_modes("backward_modes", src.emission.backward_modes);
        return src;
    }
    if (type == "noon") {
        NoonSource src;
        src.photons = int_field(j, "photons", "source");
        if (j.contains("path_a")) src.path_a = string_field(j, "path_a", "source");
        if (j.contains("path_b")) src.path_b = string_field(j, "path_b", "source");
        return src;
    }
    if (type == "single_photon_mz") {
        SinglePhotonMzSource src;
        if (j.contains("path_a")) src.path_a = string_field(j, "path_a", "source");
        if (j.contains("path_b")) src.path_b = string_field(j, "path_b", "source");
        return src;
    }
    throw ConfigError("source.type: unknown source \"" + type +
                      "\" (expected spdc, noon or single_photon_mz)");
}

ElementConfig parse_element(const nlohmann::json& j, const std::string& context) {
    const std::string kind = string_field(j, "element", context);
    if (kind == "pbs") {
        return PbsElement{string_field(j, "in1", context), string_field(j, "in2", context),
                          string_field(j, "out1", context), string_field(j, "out2", context)};
    }
    if (kind == "bs") {
        BsElement e;
        e.m1 = parse_mode(string_field(j, "m1", context), context + ".m1");
        e.m2 = parse_mode(string_field(j, "m2", context), context + ".m2");
        e.reflectivity = number_field_or(j, "reflectivity", context, 0.5);
        return e;
    }
    if (kind == "phase") {
        PhaseElement e;
        const auto& modes = require_field(j, "modes", context);
        if (!modes.is_array() || modes.empty()) {
            throw ConfigError(context + ".modes: expected a non-empty array of modes");
        }
        for (const auto& m : modes) {
            if (!m.is_string()) throw ConfigError(context + ".modes: expected mode strings");
            e.modes.push_back(parse_mode(m.get<std::string>(), context + ".modes"));
        }
        e.phi_rad = number_field_or(j, "phi_rad", context, 0.0);
        e.sweep_multiplier = number_field_or(j, "sweep_multiplier", context, 0.0);
        return e;
    }
    if (kind == "rotation") {
        return RotationElement{string_field(j, "spatial", context),
                               number_field(j, "theta_rad", context)};
    }
    throw ConfigError(context + ".element: unknown element \"" + kind +
                      "\" (expected pbs, bs, phase or rotation)");
}

nlohmann::json source_to_json(const SourceConfig& source) {
    nlohmann::json j;
    std::visit(
        [&](const auto& src) {
            using T = std::decay_t<decltype(src)>;
            if constexpr (std::is_same_v<T, SpdcSource>) {
                j["type"] = "spdc";
                j["pair_amplitude"] = src.emission.pair_amplitude;
                j["max_pairs"] = src.emission.max_pairs;
                j["forward_modes"] = src.emission.forward_modes;
                j["backward_modes"] = src.emission.backward_modes;
            } else if constexpr (std::is_same_v<T, NoonSource>) {
                j["type"] = "noon";
                j["photons"] = src.photons;
                j["path_a"] = src.path_a;
                j["path_b"] = src.path_b;
            } else {
                j["type"] = "single_photon_mz";
                j["path_a"] = src.path_a;
                j["path_b"] = src.path_b;
            }
        },
        source);
    return j;
}

nlohmann::json element_to_json(const ElementConfig& element) {
    nlohmann::json j;
    std::visit(
        [&](const auto& e) {
            using T = std::decay_t<decltype(e)>;
            if constexpr (std::is_same_v<T, PbsElement>) {
                j["element"] = "pbs";
                j["in1"] = e.in1;
                j["in2"] = e.in2;
                j["out1"] = e.out1;
                j["out2"] = e.out2;
            } else if constexpr (std::is_same_v<T, BsElement>) {
                j["element"] = "bs";
                j["m1"] = to_string(e.m1);
                j["m2"] = to_string(e.m2);
                j["reflectivity"] = e.reflectivity;
            } else if constexpr (std::is_same_v<T, PhaseElement>) {
                j["element"] = "phase";
                nlohmann::json modes = nlohmann::json::array();
                for (const auto& m : e.modes) modes.push_back(to_string(m));
                j["modes"] = std::move(modes);
                j["phi_rad"] = e.phi_rad;
                j["sweep_multiplier"] = e.sweep_multiplier;
            } else {
                j["element"] = "rotation";
                j["spatial"] = e.spatial;
                j["theta_rad"] = e.theta_rad;
            }
        },
        element);
    return j;
}

std::uint64_t fnv1a(const std::string& data) {
    std::uint64_t hash = 1469598103934665603ull;
    for (unsigned char c : data) {
        hash ^= c;
        hash *= 1099511628211ull;
    }
    return hash;
}

} // namespace

void ExperimentConfig::validate() const {
    if (version != 1) throw ConfigError("version: only config version 1 is supported");
    if (sweep.steps < 2) throw ConfigError("sweep.steps: need at least 2 sweep points");
    if (!(sweep.stop_mirror_nm > sweep.start_mirror_nm)) {
        throw ConfigError("sweep.stop_mirror_nm: must be greater than sweep.start_mirror_nm");
    }
    if (!(lambda_single_nm > 0.0)) throw ConfigError("lambda_single_nm: must be positive");
    if (!(visibility >= 0.0 && visibility <= 1.0)) {
        throw ConfigError("visibility: must be in [0, 1]");
    }
    if (sampling && sampling->shots_per_point < 1) {
        throw ConfigError("sampling.shots_per_point: must be at least 1");
    }
    if (rates && !(rates->rep_rate_hz > 0.0 && rates->detector_efficiency > 0.0 &&
                   rates->detector_efficiency <= 1.0)) {
        throw ConfigError("rates: rep_rate_hz must be positive and detector_efficiency in (0, 1]");
    }
    std::visit(
        [](const auto& src) {
            using T = std::decay_t<decltype(src)>;
            if constexpr (std::is_same_v<T, SpdcSource>) {
                src.emission.validate();
            } else if constexpr (std::is_same_v<T, NoonSource>) {
                if (src.photons < 1) throw ConfigError("source.photons: must be at least 1");
                if (src.photons > 6) {
                    throw ConfigError("source.photons: capped at 6 to bound the basis size");
                }
            }
        },
        source);
    for (const auto& pattern : detection.patterns) {
        if (pattern.size() != detection.analyzer_signs.size()) {
            throw ConfigError("detection.patterns: pattern \"" + pattern +
                              "\" does not match the number of analyzed labels");
        }
        if (pattern.find_first_not_of("+-") != std::string::npos) {
            throw ConfigError("detection.patterns: only '+' and '-' are allowed");
        }
    }
    if (!detection.patterns.empty() && detection.analyzer_signs.empty()) {
        throw ConfigError("detection.patterns: requires analyzers on at least one label");
    }
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
    ExperimentConfig config;
    if (!j.is_object()) throw ConfigError("config: expected a JSON object");
    config.version = int_field(j, "version", "config");
    config.source = parse_source(require_field(j, "source", "config"));

    const auto& circuit = require_field(j, "circuit", "config");
    if (!circuit.is_array()) throw ConfigError("circuit: expected an array of elements");
    for (std::size_t i = 0; i < circuit.size(); ++i) {
        config.circuit.push_back(
            parse_element(circuit[i], "circuit[" + std::to_string(i) + "]"));
    }

    const auto& detection = require_field(j, "detection", "config");
    const auto& counts = require_field(detection, "counts", "detection");
    if (!counts.is_object()) throw ConfigError("detection.counts: expected an object");
    for (const auto& [label, value] : counts.items()) {
        if (!value.is_number_integer() || value.get<int>() < 0) {
            throw ConfigError("detection.counts." + label + ": expected a non-negative integer");
        }
        config.detection.counts[label] = value.get<int>();
    }
    if (detection.contains("analyzers")) {
        const auto& analyzers = detection.at("analyzers");
        if (!analyzers.is_object()) throw ConfigError("detection.analyzers: expected an object");
        for (const auto& [label, value] : analyzers.items()) {
            const std::string sign = value.is_string() ? value.get<std::string>() : "";
            if (sign != "+" && sign != "-") {
                throw ConfigError("detection.analyzers." + label + ": expected \"+\" or \"-\"");
            }
            config.detection.analyzer_signs[label] =
                sign == "+" ? AnalyzerSign::plus : AnalyzerSign::minus;
        }
    }
    config.detection.analyzer_theta = number_field_or(detection, "analyzer_theta_rad", "detection",
                                                      config.detection.analyzer_theta);
    if (detection.contains("patterns")) {
        const auto& patterns = detection.at("patterns");
        if (!patterns.is_array()) throw ConfigError("detection.patterns: expected an array");
        for (const auto& p : patterns) {
            if (!p.is_string()) throw ConfigError("detection.patterns: expected sign strings");
            config.detection.patterns.push_back(p.get<std::string>());
        }
    }

    const auto& sweep = require_field(j, "sweep", "config");
    config.sweep.start_mirror_nm = number_field(sweep, "start_mirror_nm", "sweep");
    config.sweep.stop_mirror_nm = number_field(sweep, "stop_mirror_nm", "sweep");
    config.sweep.steps = int_field(sweep, "steps", "sweep");

    if (j.contains("sampling") && !j.at("sampling").is_null()) {
        const auto& sampling = j.at("sampling");
        SamplingSpec spec;
        const auto& shots = require_field(sampling, "shots_per_point", "sampling");
        if (!shots.is_number_integer()) {
            throw ConfigError("sampling.shots_per_point: expected an integer");
        }
        spec.shots_per_point = shots.get<std::int64_t>();
        config.sampling = spec;
    }
    if (j.contains("rates") && !j.at("rates").is_null()) {
        RateModel rates;
        rates.rep_rate_hz = number_field(j.at("rates"), "rep_rate_hz", "rates");
        rates.detector_efficiency = number_field(j.at("rates"), "detector_efficiency", "rates");
        config.rates = rates;
    }
    config.visibility = number_field_or(j, "visibility", "config", 1.0);
    config.lambda_single_nm = number_field_or(j, "lambda_single_nm", "config", 790.0);
    if (j.contains("pbs_convention")) {
        const std::string convention = string_field(j, "pbs_convention", "config");
        if (convention == "real") {
            config.pbs_convention = PbsConvention::real_reflection;
        } else if (convention == "imaginary") {
            config.pbs_convention = PbsConvention::imaginary_reflection;
        } else {
            throw ConfigError("pbs_convention: expected \"real\" or \"imaginary\"");
        }
    }
    if (j.contains("rng_seed")) {
        const auto& seed = j.at("rng_seed");
        if (!seed.is_number_integer()) throw ConfigError("rng_seed: expected an integer");
        config.rng_seed = seed.get<std::uint64_t>();
    }
    config.validate();
    return config;
}

ExperimentConfig ExperimentConfig::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
    }
    return from_json(j);
}

nlohmann::json ExperimentConfig::to_json() const {
    nlohmann::json j;
    j["version"] = version;
    j["source"] = source_to_json(source);
    nlohmann::json circuit_json = nlohmann::json::array();
    for (const auto& element : circuit) circuit_json.push_back(element_to_json(element));
    j["circuit"] = std::move(circuit_json);

    nlohmann::json detection_json;
    detection_json["counts"] = detection.counts;
    nlohmann::json analyzers;
    for (const auto& [label, sign] : detection.analyzer_signs) {
        analyzers[label] = std::string(1, to_char(sign));
    }
    detection_json["analyzers"] = std::move(analyzers);
    detection_json["analyzer_theta_rad"] = detection.analyzer_theta;
    if (!detection.patterns.empty()) detection_json["patterns"] = detection.patterns;
    j["detection"] = std::move(detection_json);

    j["sweep"] = {{"start_mirror_nm", sweep.start_mirror_nm},
                  {"stop_mirror_nm", sweep.stop_mirror_nm},
                  {"steps", sweep.steps}};
    if (sampling) j["sampling"] = {{"shots_per_point", sampling->shots_per_point}};
    if (rates) {
        j["rates"] = {{"rep_rate_hz", rates->rep_rate_hz},
                      {"detector_efficiency", rates->detector_efficiency}};
    }
    j["visibility"] = visibility;
    j["lambda_single_nm"] = lambda_single_nm;
    j["pbs_convention"] =
        pbs_convention == PbsConvention::real_reflection ? "real" : "imaginary";
    j["rng_seed"] = rng_seed;
    return j;
}

std::string ExperimentConfig::hash() const {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a(to_json().dump())));
    return buf;
}

bool FringeSeries::has_counts() const {
    return !points.empty() && points.front().counts.has_value();
}

namespace {

std::shared_ptr<ModeRegistry> build_registry(const ExperimentConfig& config) {
    auto registry = std::make_shared<ModeRegistry>();
    std::visit(
        [&](const auto& src) {
            using T = std::decay_t<decltype(src)>;
            if constexpr (std::is_same_v<T, SpdcSource>) {
                register_emission_modes(*registry, src.emission);
            } else {
                registry->add_spatial(src.path_a);
                registry->add_spatial(src.path_b);
            }
        },
        config.source);

    for (std::size_t i = 0; i < config.circuit.size(); ++i) {
        const std::string context = "circuit[" + std::to_string(i) + "]";
        std::visit(
            [&](const auto& e) {
                using T = std::decay_t<decltype(e)>;
                if constexpr (std::is_same_v<T, PbsElement>) {
                    for (const auto& label : {e.in1, e.in2}) {
                        if (!registry->has_spatial(label)) {
                            throw ConfigError(context + ": input label \"" + label +
                                              "\" is not produced upstream");
                        }
                    }
                    registry->add_spatial(e.out1);
                    registry->add_spatial(e.out2);
                } else if constexpr (std::is_same_v<T, BsElement>) {
                    for (const auto& mode : {e.m1, e.m2}) {
                        if (!registry->find(mode)) {
                            throw ConfigError(context + ": mode \"" + to_string(mode) +
                                              "\" is not produced upstream");
                        }
                    }
                } else if constexpr (std::is_same_v<T, PhaseElement>) {
                    for (const auto& mode : e.modes) {
                        if (!registry->find(mode)) {
                            throw ConfigError(context + ": mode \"" + to_string(mode) +
                                              "\" is not produced upstream");
                        }
                    }
                } else {
                    if (!registry->has_spatial(e.spatial)) {
                        throw ConfigError(context + ": spatial label \"" + e.spatial +
                                          "\" is not produced upstream");
                    }
                }
            },
            config.circuit[i]);
    }

    for (const auto& [label, count] : config.detection.counts) {
        if (!registry->has_spatial(label)) {
            throw ConfigError("detection.counts: label \"" + label +
                              "\" is not produced by the source or circuit");
        }
    }
    return registry;
}

std::vector<Ket> source_groups(const ExperimentConfig& config, const RegistryPtr& registry,
                               const PhaseConfig& phase) {
    std::vector<Ket> groups;
    std::visit(
        [&](const auto& src) {
            using T = std::decay_t<decltype(src)>;
            if constexpr (std::is_same_v<T, SpdcSource>) {
                EmissionConfig emission = src.emission;
                emission.vv_pair_phase = source_alignment_phase(config.pbs_convention);
                for (auto& component : emit_grouped(registry, emission, phase)) {
                    groups.push_back(std::move(component.ket));
                }
            } else if constexpr (std::is_same_v<T, NoonSource>) {
                const double half = std::numbers::sqrt2 / 2.0;
                const int n = src.photons;
                double unit = 1.0;
                for (int i = 2; i <= n; ++i) unit *= i;
                unit = 1.0 / std::sqrt(unit); // undo the sqrt(N!) of (a^dagger)^N |vac>
                const Ket vac = Ket::vacuum(registry);
                CreationMonomial all_a{1.0, {{ModeId{src.path_a, Polarization::H}, n}}};
                CreationMonomial all_b{1.0, {{ModeId{src.path_b, Polarization::H}, n}}};
                groups.push_back(apply_monomial(vac, all_a) * Complex{half * unit});
                groups.push_back(apply_monomial(vac, all_b) *
                                 (std::polar(1.0, n * phase.delta_phi()) * half * unit));
            } else {
                const double half = std::numbers::sqrt2 / 2.0;
                const Ket vac = Ket::vacuum(registry);
                CreationMonomial fwd{1.0, {{ModeId{src.path_a, Polarization::H}, 1}}};
                CreationMonomial bwd{1.0, {{ModeId{src.path_b, Polarization::V}, 1}}};
                groups.push_back(apply_monomial(vac, fwd) * Complex{half});
                groups.push_back(apply_monomial(vac, bwd) *
                                 (std::polar(1.0, phase.delta_phi()) * half));
            }
        },
        config.source);
    return groups;
}

ModeTransform build_circuit(const ExperimentConfig& config, const RegistryPtr& registry,
                            double dphi) {
    ModeTransform transform = ModeTransform::identity(registry);
    for (const auto& element : config.circuit) {
        std::visit(
            [&](const auto& e) {
                using T = std::decay_t<decltype(e)>;
                if constexpr (std::is_same_v<T, PbsElement>) {
                    transform = transform.then(
                        pbs(registry, e.in1, e.in2, e.out1, e.out2, config.pbs_convention));
                } else if constexpr (std::is_same_v<T, BsElement>) {
                    transform = transform.then(beamsplitter(registry, e.m1, e.m2, e.reflectivity));
                } else if constexpr (std::is_same_v<T, PhaseElement>) {
                    transform = transform.then(phase_shift(
                        registry, e.modes, e.phi_rad + e.sweep_multiplier * dphi));
                } else {
                    transform = transform.then(polarization_rotation(registry, e.spatial,
                                                                     e.theta_rad));
                }
            },
            element);
    }
    return transform;
}

bool circuit_is_static(const ExperimentConfig& config) {
    for (const auto& element : config.circuit) {
        if (const auto* phase = std::get_if<PhaseElement>(&element)) {
            if (phase->sweep_multiplier != 0.0) return false;
        }
    }
    return true;
}

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn) {
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
    if (threads == 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::mutex error_mutex;
    std::exception_ptr first_error;
    std::atomic<std::size_t> next{0};
    {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
                    try {
                        fn(i);
                    } catch (...) {
                        std::scoped_lock lock(error_mutex);
                        if (!first_error) first_error = std::current_exception();
                    }
                }
            });
        }
    }
    if (first_error) std::rethrow_exception(first_error);
}

} // namespace

unsigned sweep_thread_cap() {
    if (const char* env = std::getenv("NOON_SIM_THREADS")) {
        char* end = nullptr;
        const long parsed = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && parsed >= 1) return static_cast<unsigned>(parsed);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1u : hw;
}

std::vector<FringeSeries> run_sweep(const ExperimentConfig& config) {
    config.validate();
    const RegistryPtr registry = build_registry(config);

    DetectionSpec base_spec;
    base_spec.counts = config.detection.counts;
    for (const auto& [label, sign] : config.detection.analyzer_signs) {
        base_spec.analyzers.emplace(label,
                                    AnalyzerSetting{sign, config.detection.analyzer_theta});
    }
    base_spec.validate(*registry);

    std::vector<DetectionSpec> specs;
    std::vector<std::string> labels;
    if (config.detection.patterns.empty()) {
        specs.push_back(base_spec);
        std::string label;
        for (const auto& [name, setting] : base_spec.analyzers) {
            label.push_back(to_char(setting.sign));
        }
        labels.push_back(label);
    } else {
        for (const auto& pattern : config.detection.patterns) {
            specs.push_back(base_spec.with_pattern(pattern));
            labels.push_back(pattern);
        }
    }

    const VisibilityModel vis{config.visibility};
    vis.validate();

    const int steps = config.sweep.steps;
    const double start = config.sweep.start_mirror_nm;
    const double span = config.sweep.stop_mirror_nm - config.sweep.start_mirror_nm;

    std::optional<ModeTransform> static_circuit;
    if (circuit_is_static(config)) static_circuit = build_circuit(config, registry, 0.0);

    std::vector<std::vector<double>> values(specs.size(),
                                            std::vector<double>(static_cast<std::size_t>(steps)));
    std::vector<double> xs(static_cast<std::size_t>(steps));

    parallel_for(static_cast<std::size_t>(steps), sweep_thread_cap(), [&](std::size_t i) {
        const double dx = start + span * static_cast<double>(i) / (steps - 1);
        const PhaseConfig phase{config.lambda_single_nm, dx};
        xs[i] = phase.optical_path_nm();

        std::vector<Ket> groups = source_groups(config, registry, phase);
        if (static_circuit) {
            for (auto& group : groups) group = apply_transform(group, *static_circuit);
        } else {
            const ModeTransform circuit = build_circuit(config, registry, phase.delta_phi());
            for (auto& group : groups) group = apply_transform(group, circuit);
        }

        for (std::size_t s = 0; s < specs.size(); ++s) {
            values[s][i] = specs[s].analyzers.empty()
                               ? coincidence_probability(groups, specs[s].counts, vis)
                               : detection_probability(groups, specs[s], vis);
        }
    });

    std::vector<FringeSeries> series;
    series.reserve(specs.size());
    const std::string hash = config.hash();
    for (std::size_t s = 0; s < specs.size(); ++s) {
        FringeSeries one;
        one.pattern = labels[s];
        one.config_hash = hash;
        one.points.reserve(static_cast<std::size_t>(steps));
        for (std::size_t i = 0; i < static_cast<std::size_t>(steps); ++i) {
            one.points.push_back({xs[i], values[s][i], std::nullopt});
        }
        series.push_back(std::move(one));
    }
    return series;
}

FringeSeries sample_counts(const FringeSeries& series, std::int64_t shots, std::uint64_t seed) {
    if (shots < 1) throw ConfigError("shots must be at least 1");
    FringeSeries out = series;
    std::mt19937_64 rng(seed);
    for (auto& point : out.points) {
        const double mean = static_cast<double>(shots) * std::clamp(point.probability, 0.0, 1.0);
        if (mean <= 0.0) {
            point.counts = 0;
            continue;
        }
        std::poisson_distribution<std::int64_t> poisson(mean);
        point.counts = poisson(rng);
    }
    return out;
}

void write_series(const FringeSeries& series, std::ostream& out) {
    const bool with_counts = series.has_counts();
    if (!series.config_hash.empty()) out << "# config_hash=" << series.config_hash << '\n';
    if (!series.pattern.empty()) out << "# pattern=" << series.pattern << '\n';
    out << "optical_path_nm,probability";
    if (with_counts) out << ",counts";
    out << '\n';
    for (const auto& point : series.points) {
        if (with_counts != point.counts.has_value()) {
            throw RuntimeError("fringe series mixes sampled and unsampled points");
        }
        out << format_double(point.optical_path_nm) << ',' << format_double(point.probability);
        if (with_counts) out << ',' << *point.counts;
        out << '\n';
    }
}

void write_series(const FringeSeries& series, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw RuntimeError("cannot open for writing: " + path.string());
    write_series(series, out);
    if (!out) throw RuntimeError("failed writing: " + path.string());
}

namespace {

std::vector<std::string> split_csv_row(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream stream(line);
    while (std::getline(stream, cell, ',')) cells.push_back(cell);
    return cells;
}

double parse_csv_double(const std::string& cell, const std::string& name, std::size_t line) {
    char* end = nullptr;
    const double value = std::strtod(cell.c_str(), &end);
    if (end != cell.c_str() + cell.size() || cell.empty()) {
        throw ParseError(name, line, "expected a number, got \"" + cell + "\"");
    }
    return value;
}

} // namespace

FringeSeries read_series(std::istream& in, const std::string& name) {
    FringeSeries series;
    std::string line;
    std::size_t line_number = 0;
    bool header_seen = false;
    bool with_counts = false;

    while (std::getline(in, line)) {
        ++line_number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line.front() == '#') {
            const auto eq = line.find('=');
            if (eq == std::string::npos) {
                throw ParseError(name, line_number, "metadata line must look like \"# key=value\"");
            }
            std::string key = line.substr(1, eq - 1);
            key.erase(0, key.find_first_not_of(' '));
            const std::string value = line.substr(eq + 1);
            if (key == "config_hash") {
                series.config_hash = value;
            } else if (key == "pattern") {
                series.pattern = value;
            } else {
                throw ParseError(name, line_number, "unknown metadata key \"" + key + "\"");
            }
            continue;
        }
        if (!header_seen) {
            if (line == "optical_path_nm,probability") {
                with_counts = false;
            } else if (line == "optical_path_nm,probability,counts") {
                with_counts = true;
            } else {
                throw ParseError(name, line_number, "unrecognized header \"" + line + "\"");
            }
            header_seen = true;
            continue;
        }
        const auto cells = split_csv_row(line);
        if (cells.size() != (with_counts ? 3u : 2u)) {
            throw ParseError(name, line_number,
                             "expected " + std::to_string(with_counts ? 3 : 2) + " columns, got " +
                                 std::to_string(cells.size()));
        }
        FringePoint point;
        point.optical_path_nm = parse_csv_double(cells[0], name, line_number);
        point.probability = parse_csv_double(cells[1], name, line_number);
        if (point.probability < -1e-12 || point.probability > 1.0 + 1e-12) {
            throw ParseError(name, line_number, "probability out of [0, 1]");
        }
        if (with_counts) {
            char* end = nullptr;
            const long long counts = std::strtoll(cells[2].c_str(), &end, 10);
            if (end != cells[2].c_str() + cells[2].size() || counts < 0) {
                throw ParseError(name, line_number, "expected a non-negative count");
            }
            point.counts = counts;
        }
        if (!series.points.empty() &&
            point.optical_path_nm <= series.points.back().optical_path_nm) {
            throw ParseError(name, line_number, "optical_path_nm must be strictly increasing");
        }
        series.points.push_back(point);
    }
    if (!header_seen) throw ParseError(name, line_number, "missing CSV header");
    return series;
}

FringeSeries read_series(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open series file: " + path.string());
    return read_series(in, path.string());
}

nlohmann::json summarize_series(const FringeSeries& series, const ExperimentConfig& config) {
    nlohmann::json j;
    j["pattern"] = series.pattern;
    j["points"] = series.points.size();
    j["config_hash"] = series.config_hash;
    j["sampled"] = series.has_counts();
    if (config.sampling) j["shots_per_point"] = config.sampling->shots_per_point;

    double min_p = 1.0;
    double max_p = 0.0;
    double sum_p = 0.0;
    for (const auto& point : series.points) {
        min_p = std::min(min_p, point.probability);
        max_p = std::max(max_p, point.probability);
        sum_p += point.probability;
    }
    if (series.points.empty()) {
        min_p = 0.0;
        max_p = 0.0;
    }
    j["min_probability"] = min_p;
    j["max_probability"] = max_p;

    if (config.rates && std::holds_alternative<SpdcSource>(config.source)) {
        const auto& spdc = std::get<SpdcSource>(config.source);
        int photons = 0;
        for (const auto& [label, count] : config.detection.counts) photons += count;
        const int pairs = (photons + 1) / 2;
        const double scale = config.rates->rep_rate_hz *
                             std::pow(spdc.emission.pair_amplitude, pairs) *
                             std::pow(config.rates->detector_efficiency, photons);
        const double mean_p = series.points.empty()
                                  ? 0.0
                                  : sum_p / static_cast<double>(series.points.size());
        j["expected_rate_hz"] = {{"min", scale * min_p},
                                 {"mean", scale * mean_p},
                                 {"max", scale * max_p}};
    }
    return j;
}

} // namespace noonsim
