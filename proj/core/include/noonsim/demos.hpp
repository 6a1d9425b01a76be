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

#include <filesystem>
#include <string>
#include <vector>

#include "noonsim/analysis.hpp"
#include "noonsim/experiment.hpp"

namespace noonsim::demos {

struct NamedConfig {
    std::string name;
    int photons = 0; // de Broglie order of the fringe, 0 when not applicable
    ExperimentConfig config;
};

/// "fig3": pure one-, two- and four-photon fringes measured by the same
/// double-pass setup - a single photon recombined on a PBS, the two-photon
/// coincidence behind (+,-) analyzers, and the four-photon coincidence
/// behind an odd-parity (+,-,+,+) projection. Periods 790, 395 and
/// 197.5 nm of optical path.
std::vector<NamedConfig> fringe_set_configs();

/// "fig4": the same source without the parity trick - (+,+) on the
/// two-photon coincidence and (+,+,+,+) on the four-photon one. The
/// four-fold curve mixes the half- and quarter-wavelength harmonics with
/// amplitude ratio 4:1.
std::vector<NamedConfig> mixed_harmonic_configs();

struct DemoResult {
    std::vector<std::filesystem::path> files;
    nlohmann::json report;
};

/// Runs a named demo ("fig3" or "fig4") into out_dir: one CSV and one
/// config JSON per curve, plus a summary report (de Broglie table for fig3,
/// harmonic weights for fig4). Throws ConfigError for unknown names.
DemoResult run_demo(const std::string& figure, const std::filesystem::path& out_dir);

} // namespace noonsim::demos
