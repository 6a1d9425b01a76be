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

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "noonsim/experiment.hpp"

namespace noonsim {

struct DominantPeriod {
    bool found = false;          // false for a constant series
    double wavelength_nm = 0.0;  // period of the strongest nonzero frequency
};

/// Strongest nonzero-frequency component of the mean-subtracted series
/// (discrete transform, ties broken toward the lower frequency). Needs at
/// least 8 uniformly spaced points.
DominantPeriod dominant_period(const FringeSeries& series);

/// Least-squares fit of A + B cos(k x + phi0).
struct FitResult {
    double offset = 0.0;        // A
    double amplitude = 0.0;     // B >= 0 (sign absorbed into phi0)
    double wavenumber = 0.0;    // k, rad/nm
    double phase = 0.0;         // phi0, rad
    double wavelength_nm = 0.0; // 2 pi / k
    double visibility = 0.0;    // B / A
    double residual_rms = 0.0;

    double offset_sigma = 0.0;
    double amplitude_sigma = 0.0;
    double wavenumber_sigma = 0.0;
    double phase_sigma = 0.0;
    double wavelength_sigma = 0.0;

    bool k_identifiable = true;      // false when the series carries no oscillation
    bool short_series_warning = false; // set when the data spans < 2 fitted periods

    nlohmann::json to_json() const;
    std::string text() const;

    double evaluate(double x) const;
};

/// Separable solve: for each candidate k, (A, B cos phi0, B sin phi0) come
/// from a weighted linear system; k is scanned over +/-30% around the
/// initializer (2001 points) and refined by golden section. Counts, when
/// present, are the fitted quantity with per-point sigma sqrt(count + 1).
FitResult fit_cosine(const FringeSeries& series,
                     std::optional<double> initial_wavelength_nm = std::nullopt);

struct DeBroglieEntry {
    int photons = 1;
    FitResult fit;
};

struct DeBroglieRow {
    int photons = 1;
    double wavelength_nm = 0.0;
    double wavelength_sigma = 0.0;
    double visibility = 0.0;
    double ratio = 1.0;       // lambda(1) / lambda(N)
    double ratio_sigma = 0.0; // propagated from the wavelength sigmas
    double deviation = 0.0;   // ratio - N
};

/// Effective-wavelength table: lambda(N), the ratio lambda(1)/lambda(N) and
/// its deviation from N. The first entry supplies lambda(1).
struct DeBroglieReport {
    std::vector<DeBroglieRow> rows;

    std::string text() const;
    nlohmann::json to_json() const;
};

DeBroglieReport debroglie_report(std::span<const DeBroglieEntry> entries);

/// Plot-friendly two-column dump "x y" of a series (probability or counts).
void write_xy(const FringeSeries& series, std::ostream& out);

/// Least-squares amplitudes of cosine components at fixed wavelengths
/// (joint linear solve with a free offset and per-component phase). Exact on
/// noiseless data regardless of the sample grid; used to weigh the harmonic
/// content of mixed fringes.
std::vector<double> harmonic_amplitudes(const FringeSeries& series,
                                        std::span<const double> wavelengths_nm);

} // namespace noonsim
