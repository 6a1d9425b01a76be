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

#include "noonsim/measurement.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "noonsim/elements.hpp"

namespace noonsim {

namespace {

constexpr double kSectorZero = 1e-28; // squared-norm floor for an empty sector
constexpr double kSpectralPurity = 1e-9;

using LabelIndices = std::map<std::string, std::vector<std::size_t>>;

LabelIndices resolve_labels(const ModeRegistry& registry, const CountSpec& counts) {
    LabelIndices out;
    for (const auto& [label, count] : counts) {
        if (count < 0) throw ConfigError("negative photon count for label " + label);
        out.emplace(label, registry.spatial_indices(label));
    }
    return out;
}

int label_total(const FockBasisState& state, const std::vector<std::size_t>& indices) {
    int total = 0;
    for (std::size_t idx : indices) total += state.occupation(idx);
    return total;
}

Ket project_counts(const Ket& ket, const CountSpec& counts, const LabelIndices& indices) {
    Ket out(ket.registry());
    for (const auto& [state, amp] : ket.terms()) {
        bool keep = true;
        for (const auto& [label, count] : counts) {
            if (label_total(state, indices.at(label)) != count) {
                keep = false;
                break;
            }
        }
        if (keep) out.add_term(state, amp);
    }
    return out;
}

/// ||sum_g kets_g||^2 with cross-group terms scaled by V; equivalently the
/// convex mixture V * coherent + (1 - V) * incoherent.
double mixture_norm_squared(std::span<const Ket> groups, double v) {
    double incoherent = 0.0;
    for (const auto& group : groups) incoherent += group.norm_squared();
    if (groups.size() == 1 || v == 0.0) return incoherent;
    Ket coherent(groups.front().registry());
    for (const auto& group : groups) coherent += group;
    return v * coherent.norm_squared() + (1.0 - v) * incoherent;
}

/// Keeps the terms where each analyzed label has all of its photons in the
/// analyzer's output polarization mode (H for +, V for -) after rotation.
Ket select_analyzer_outcome(const Ket& rotated, const DetectionSpec& spec,
                            const ModeRegistry& registry) {
    struct LabelSelector {
        std::size_t accept_mode;
        std::size_t reject_mode;
        int count;
    };
    std::vector<LabelSelector> selectors;
    selectors.reserve(spec.analyzers.size());
    for (const auto& [label, setting] : spec.analyzers) {
        const std::size_t h = registry.index_of({label, Polarization::H});
        const std::size_t v = registry.index_of({label, Polarization::V});
        const bool plus = setting.sign == AnalyzerSign::plus;
        selectors.push_back({plus ? h : v, plus ? v : h, spec.counts.at(label)});
    }

    Ket out(rotated.registry());
    for (const auto& [state, amp] : rotated.terms()) {
        bool keep = true;
        for (const auto& sel : selectors) {
            if (state.occupation(sel.accept_mode) != sel.count ||
                state.occupation(sel.reject_mode) != 0) {
                keep = false;
                break;
            }
        }
        if (keep) out.add_term(state, amp);
    }
    return out;
}

ModeTransform analyzer_rotation(const RegistryPtr& registry,
                                const std::map<std::string, AnalyzerSetting>& analyzers) {
    ModeTransform rotation = ModeTransform::identity(registry);
    for (const auto& [label, setting] : analyzers) {
        rotation = rotation.then(polarization_rotation(registry, label, setting.theta));
    }
    return rotation;
}

} // namespace

char to_char(AnalyzerSign s) { return s == AnalyzerSign::plus ? '+' : '-'; }

void DetectionSpec::validate(const ModeRegistry& registry) const {
    for (const auto& [label, count] : counts) {
        if (count < 0) throw ConfigError("negative photon count for label " + label);
        registry.spatial_indices(label);
    }
    for (const auto& [label, setting] : analyzers) {
        auto it = counts.find(label);
        if (it == counts.end() || it->second < 1) {
            throw ConfigError("analyzed label " + label + " needs a photon count of at least 1");
        }
    }
}

std::vector<std::string> DetectionSpec::analyzed_labels() const {
    std::vector<std::string> out;
    out.reserve(analyzers.size());
    for (const auto& [label, setting] : analyzers) out.push_back(label);
    return out; // std::map iterates in lexicographic order already
}

DetectionSpec DetectionSpec::with_pattern(const std::string& pattern) const {
    DetectionSpec out = *this;
    const auto labels = analyzed_labels();
    if (pattern.size() != labels.size()) {
        throw ConfigError("sign pattern \"" + pattern + "\" does not match " +
                          std::to_string(labels.size()) + " analyzed labels");
    }
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const char c = pattern[i];
        if (c != '+' && c != '-') {
            throw ConfigError("sign pattern may contain only '+' and '-'");
        }
        out.analyzers.at(labels[i]).sign = c == '+' ? AnalyzerSign::plus : AnalyzerSign::minus;
    }
    return out;
}

void VisibilityModel::validate() const {
    if (!(v >= 0.0 && v <= 1.0)) throw ConfigError("visibility must be in [0, 1]");
}

Ket postselect_counts(const Ket& ket, const CountSpec& counts) {
    const auto indices = resolve_labels(*ket.registry(), counts);
    return project_counts(ket, counts, indices);
}

double coincidence_probability(const Ket& ket, const CountSpec& counts) {
    return coincidence_probability(std::span<const Ket>(&ket, 1), counts);
}

double coincidence_probability(std::span<const Ket> origin_groups, const CountSpec& counts,
                               const VisibilityModel& vis) {
    vis.validate();
    if (origin_groups.empty()) throw ConfigError("no state components given");
    const auto& registry = origin_groups.front().registry();
    const auto indices = resolve_labels(*registry, counts);

    std::vector<Ket> projected;
    projected.reserve(origin_groups.size());
    for (const auto& group : origin_groups) {
        if (group.registry() != registry) throw ConfigError("state components share no registry");
        projected.push_back(project_counts(group, counts, indices));
    }
    const double total = mixture_norm_squared(origin_groups, vis.v);
    if (total < kSectorZero) throw RuntimeError("cannot condition on a zero state");
    return mixture_norm_squared(projected, vis.v) / total;
}

double detection_probability(const Ket& ket, const DetectionSpec& spec,
                             const VisibilityModel& vis) {
    if (vis.v < 1.0) {
        throw ConfigError("visibility below 1 requires origin-grouped state components");
    }
    return detection_probability(std::span<const Ket>(&ket, 1), spec, vis);
}

double detection_probability(std::span<const Ket> origin_groups, const DetectionSpec& spec,
                             const VisibilityModel& vis) {
    vis.validate();
    if (origin_groups.empty()) throw ConfigError("no state components given");
    const auto& registry = origin_groups.front().registry();
    spec.validate(*registry);
    const auto indices = resolve_labels(*registry, spec.counts);

    std::vector<Ket> sector;
    sector.reserve(origin_groups.size());
    for (const auto& group : origin_groups) {
        if (group.registry() != registry) throw ConfigError("state components share no registry");
        sector.push_back(project_counts(group, spec.counts, indices));
    }
    const double sector_weight = mixture_norm_squared(sector, vis.v);
    if (sector_weight < kSectorZero) return 0.0; // empty post-selection sector

    if (spec.analyzers.empty()) return 1.0;

    const ModeTransform rotation = analyzer_rotation(registry, spec.analyzers);
    std::vector<Ket> accepted;
    accepted.reserve(sector.size());
    for (const auto& part : sector) {
        accepted.push_back(select_analyzer_outcome(apply_transform(part, rotation), spec,
                                                   *registry));
    }
    return mixture_norm_squared(accepted, vis.v) / sector_weight;
}

std::map<std::string, double> pattern_distribution(const Ket& ket, const CountSpec& counts,
                                                   double theta) {
    const auto& registry = ket.registry();
    const auto indices = resolve_labels(*registry, counts);
    const Ket sector = project_counts(ket, counts, indices);

    std::vector<std::string> labels;
    for (const auto& [label, count] : counts) labels.push_back(label);
    const std::size_t m = labels.size();

    std::map<std::string, double> distribution;
    for (std::size_t bits = 0; bits < (std::size_t{1} << m); ++bits) {
        std::string pattern(m, '+');
        for (std::size_t i = 0; i < m; ++i) {
            if (bits & (std::size_t{1} << i)) pattern[i] = '-';
        }
        distribution.emplace(std::move(pattern), 0.0);
    }

    const double sector_weight = sector.norm_squared();
    if (sector_weight < kSectorZero) return distribution;

    std::map<std::string, AnalyzerSetting> analyzers;
    for (const auto& label : labels) analyzers.emplace(label, AnalyzerSetting{AnalyzerSign::plus, theta});
    const Ket rotated = apply_transform(sector, analyzer_rotation(registry, analyzers));

    // The projector is diagonal in the rotated basis: classify each term.
    for (const auto& [state, amp] : rotated.terms()) {
        std::string pattern(m, '?');
        bool classified = true;
        for (std::size_t i = 0; i < m && classified; ++i) {
            const int count = counts.at(labels[i]);
            const int in_h = state.occupation(registry->index_of({labels[i], Polarization::H}));
            const int in_v = state.occupation(registry->index_of({labels[i], Polarization::V}));
            if (in_h == count && in_v == 0) {
                pattern[i] = '+';
            } else if (in_v == count && in_h == 0) {
                pattern[i] = '-';
            } else {
                classified = false; // photons split across analyzer outputs
            }
        }
        if (classified) distribution.at(pattern) += std::norm(amp) / sector_weight;
    }
    return distribution;
}

std::vector<std::string> find_pure_projections(const std::function<Ket(double)>& state_at_phase,
                                               const CountSpec& counts, int harmonic,
                                               const PhaseGrid& grid) {
    if (grid.points < 8) throw ConfigError("phase grid needs at least 8 points");
    if (harmonic < 1 || harmonic > grid.points / 2 - 1) {
        throw ConfigError("harmonic must resolve on the phase grid");
    }

    const double step = (grid.stop - grid.start) / grid.points;
    std::map<std::string, std::vector<double>> curves;
    for (int j = 0; j < grid.points; ++j) {
        const Ket state = state_at_phase(grid.start + step * j);
        for (const auto& [pattern, p] : pattern_distribution(state, counts)) {
            curves[pattern].push_back(p);
        }
    }

    std::vector<std::string> pure;
    for (const auto& [pattern, values] : curves) {
        const int n = static_cast<int>(values.size());
        auto bin_magnitude = [&](int m) {
            Complex sum = 0.0;
            for (int j = 0; j < n; ++j) {
                sum += values[static_cast<std::size_t>(j)] *
                       std::polar(1.0, -2.0 * std::numbers::pi * m * j / n);
            }
            return std::abs(sum);
        };
        const double target = bin_magnitude(harmonic);
        if (target < 1e-12 * n) continue; // no oscillation at the harmonic
        bool clean = true;
        for (int m = 1; m <= n / 2 && clean; ++m) {
            if (m == harmonic) continue;
            if (bin_magnitude(m) > kSpectralPurity * target) clean = false;
        }
        if (clean) pure.push_back(pattern);
    }
    return pure;
}

} // namespace noonsim
