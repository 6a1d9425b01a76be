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

#include "noonsim/analysis.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <sstream>

namespace noonsim {

namespace {

constexpr int kScanPoints = 2001;
constexpr double kScanSpread = 0.30; // +/-30% around the initializer

struct Samples {
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> w; // least-squares weights (1 / sigma^2)
};

Samples extract_samples(const FringeSeries& series) {
    Samples s;
    const bool use_counts = series.has_counts();
    s.x.reserve(series.points.size());
    s.y.reserve(series.points.size());
    s.w.reserve(series.points.size());
    for (const auto& point : series.points) {
        s.x.push_back(point.optical_path_nm);
        if (use_counts) {
            const double c = static_cast<double>(*point.counts);
            s.y.push_back(c);
            s.w.push_back(1.0 / (c + 1.0)); // Poisson sigma ~ sqrt(count + 1)
        } else {
            s.y.push_back(point.probability);
            s.w.push_back(1.0);
        }
    }
    return s;
}

struct LinearSolution {
    double a = 0.0; // offset
    double c = 0.0; // cos coefficient
    double s = 0.0; // sin coefficient
    double sse = 0.0;
};

LinearSolution solve_at_wavenumber(const Samples& samples, double k) {
    Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
    Eigen::Vector3d b = Eigen::Vector3d::Zero();
    for (std::size_t i = 0; i < samples.x.size(); ++i) {
        const double phase = k * samples.x[i];
        const Eigen::Vector3d basis(1.0, std::cos(phase), std::sin(phase));
        m += samples.w[i] * basis * basis.transpose();
        b += samples.w[i] * samples.y[i] * basis;
    }
    const Eigen::Vector3d coeffs = m.ldlt().solve(b);
    LinearSolution out{coeffs(0), coeffs(1), coeffs(2), 0.0};
    for (std::size_t i = 0; i < samples.x.size(); ++i) {
        const double phase = k * samples.x[i];
        const double fit = out.a + out.c * std::cos(phase) + out.s * std::sin(phase);
        const double r = samples.y[i] - fit;
        out.sse += samples.w[i] * r * r;
    }
    return out;
}

double golden_section(const Samples& samples, double lo, double hi) {
    constexpr double inv_phi = 0.6180339887498949;
    double a = lo;
    double b = hi;
    double c = b - (b - a) * inv_phi;
    double d = a + (b - a) * inv_phi;
    double fc = solve_at_wavenumber(samples, c).sse;
    double fd = solve_at_wavenumber(samples, d).sse;
    while ((b - a) > 1e-12 * std::abs(a + b)) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - (b - a) * inv_phi;
            fc = solve_at_wavenumber(samples, c).sse;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + (b - a) * inv_phi;
            fd = solve_at_wavenumber(samples, d).sse;
        }
    }
    return 0.5 * (a + b);
}

std::string format_number(double v, int precision = 6) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.*g", precision, v);
    return buf;
}

} // namespace

DominantPeriod dominant_period(const FringeSeries& series) {
    const std::size_t n = series.points.size();
    if (n < 8) throw ConfigError("dominant_period needs at least 8 points");
    const double dx =
        (series.points.back().optical_path_nm - series.points.front().optical_path_nm) /
        static_cast<double>(n - 1);
    if (!(dx > 0.0)) throw ConfigError("dominant_period needs increasing sample positions");
    for (std::size_t i = 1; i < n; ++i) {
        const double step =
            series.points[i].optical_path_nm - series.points[i - 1].optical_path_nm;
        if (std::abs(step - dx) > 1e-6 * dx) {
            throw ConfigError("dominant_period needs uniformly spaced samples");
        }
    }

    const bool use_counts = series.has_counts();
    std::vector<double> y(n);
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        y[i] = use_counts ? static_cast<double>(*series.points[i].counts)
                          : series.points[i].probability;
        mean += y[i];
    }
    mean /= static_cast<double>(n);
    double scale = 0.0;
    for (auto& v : y) {
        v -= mean;
        scale += std::abs(v);
    }

    DominantPeriod result;
    if (scale < 1e-14 * static_cast<double>(n) * std::max(1.0, std::abs(mean))) {
        return result; // constant series: no oscillation
    }

    double best_mag = -1.0;
    std::size_t best_m = 0;
    for (std::size_t m = 1; m <= n / 2; ++m) {
        std::complex<double> bin = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            bin += y[j] * std::polar(1.0, -2.0 * std::numbers::pi *
                                              static_cast<double>(m * j) /
                                              static_cast<double>(n));
        }
        const double mag = std::abs(bin);
        if (mag > best_mag * (1.0 + 1e-12)) { // ties break toward the lower frequency
            best_mag = mag;
            best_m = m;
        }
    }
    result.found = true;
    result.wavelength_nm = static_cast<double>(n) * dx / static_cast<double>(best_m);
    return result;
}

double FitResult::evaluate(double x) const {
    return offset + amplitude * std::cos(wavenumber * x + phase);
}

FitResult fit_cosine(const FringeSeries& series, std::optional<double> initial_wavelength_nm) {
    if (series.points.size() < 8) throw ConfigError("fit_cosine needs at least 8 points");
    const Samples samples = extract_samples(series);
    const std::size_t n = samples.x.size();

    double y_scale = 0.0;
    for (double v : samples.y) y_scale = std::max(y_scale, std::abs(v));

    auto unidentifiable = [&]() {
        FitResult flat;
        double wsum = 0.0;
        double ysum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            wsum += samples.w[i];
            ysum += samples.w[i] * samples.y[i];
        }
        flat.offset = wsum > 0.0 ? ysum / wsum : 0.0;
        flat.k_identifiable = false;
        double rss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            rss += (samples.y[i] - flat.offset) * (samples.y[i] - flat.offset);
        }
        flat.residual_rms = std::sqrt(rss / static_cast<double>(n));
        return flat;
    };

    double k0 = 0.0;
    if (initial_wavelength_nm) {
        if (!(*initial_wavelength_nm > 0.0)) {
            throw ConfigError("initial wavelength must be positive");
        }
        k0 = 2.0 * std::numbers::pi / *initial_wavelength_nm;
    } else {
        const DominantPeriod initial = dominant_period(series);
        if (!initial.found) return unidentifiable();
        k0 = 2.0 * std::numbers::pi / initial.wavelength_nm;
    }

    const double k_lo = k0 * (1.0 - kScanSpread);
    const double k_hi = k0 * (1.0 + kScanSpread);
    double best_sse = std::numeric_limits<double>::infinity();
    int best_index = -1;
    for (int i = 0; i < kScanPoints; ++i) {
        const double k = k_lo + (k_hi - k_lo) * static_cast<double>(i) / (kScanPoints - 1);
        const double sse = solve_at_wavenumber(samples, k).sse;
        if (sse < best_sse) {
            best_sse = sse;
            best_index = i;
        }
    }
    if (best_index == 0 || best_index == kScanPoints - 1) {
        const LinearSolution edge = solve_at_wavenumber(
            samples, k_lo + (k_hi - k_lo) * static_cast<double>(best_index) / (kScanPoints - 1));
        if (std::hypot(edge.c, edge.s) < 1e-8 * std::max(y_scale, 1e-30)) {
            return unidentifiable();
        }
        throw RuntimeError("fit_cosine did not converge: wavenumber scan hit its bracket [" +
                           format_number(k_lo, 12) + ", " + format_number(k_hi, 12) +
                           "] rad/nm; pass a better initial wavelength");
    }

    const double step = (k_hi - k_lo) / (kScanPoints - 1);
    const double k = golden_section(samples, k_lo + (best_index - 1) * step,
                                    k_lo + (best_index + 1) * step);
    const LinearSolution sol = solve_at_wavenumber(samples, k);

    FitResult fit;
    fit.offset = sol.a;
    fit.amplitude = std::hypot(sol.c, sol.s);
    fit.wavenumber = k;
    fit.phase = std::atan2(-sol.s, sol.c);
    fit.wavelength_nm = 2.0 * std::numbers::pi / k;
    fit.visibility = fit.amplitude / std::max(std::abs(fit.offset), 1e-300);

    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = samples.y[i] - fit.evaluate(samples.x[i]);
        rss += r * r;
    }
    fit.residual_rms = std::sqrt(rss / static_cast<double>(n));

    // Linearized covariance at the optimum, parameters (A, B, k, phi0).
    if (n > 4 && fit.amplitude > 0.0) {
        Eigen::Matrix4d normal = Eigen::Matrix4d::Zero();
        for (std::size_t i = 0; i < n; ++i) {
            const double ph = k * samples.x[i] + fit.phase;
            Eigen::Vector4d jac(1.0, std::cos(ph), -fit.amplitude * samples.x[i] * std::sin(ph),
                                -fit.amplitude * std::sin(ph));
            normal += samples.w[i] * jac * jac.transpose();
        }
        const double dof_variance = sol.sse / static_cast<double>(n - 4);
        const Eigen::Matrix4d covariance = dof_variance * normal.inverse();
        fit.offset_sigma = std::sqrt(std::max(0.0, covariance(0, 0)));
        fit.amplitude_sigma = std::sqrt(std::max(0.0, covariance(1, 1)));
        fit.wavenumber_sigma = std::sqrt(std::max(0.0, covariance(2, 2)));
        fit.phase_sigma = std::sqrt(std::max(0.0, covariance(3, 3)));
        fit.wavelength_sigma = fit.wavelength_nm / k * fit.wavenumber_sigma;
    }

    const double span = samples.x.back() - samples.x.front();
    fit.short_series_warning = span < 2.0 * fit.wavelength_nm;
    return fit;
}

nlohmann::json FitResult::to_json() const {
    return {{"offset", offset},
            {"amplitude", amplitude},
            {"wavenumber_rad_per_nm", wavenumber},
            {"phase_rad", phase},
            {"wavelength_nm", wavelength_nm},
            {"visibility", visibility},
            {"residual_rms", residual_rms},
            {"offset_sigma", offset_sigma},
            {"amplitude_sigma", amplitude_sigma},
            {"wavenumber_sigma", wavenumber_sigma},
            {"phase_sigma", phase_sigma},
            {"wavelength_sigma_nm", wavelength_sigma},
            {"k_identifiable", k_identifiable},
            {"short_series_warning", short_series_warning}};
}

std::string FitResult::text() const {
    std::ostringstream out;
    if (!k_identifiable) {
        out << "no oscillation found: offset " << format_number(offset)
            << ", residual rms " << format_number(residual_rms) << '\n';
        return out.str();
    }
    out << "wavelength   " << format_number(wavelength_nm, 10) << " nm";
    if (wavelength_sigma > 0.0) out << " +/- " << format_number(wavelength_sigma, 3);
    out << '\n';
    out << "offset       " << format_number(offset, 10) << '\n';
    out << "amplitude    " << format_number(amplitude, 10) << '\n';
    out << "phase        " << format_number(phase, 10) << " rad\n";
    out << "visibility   " << format_number(visibility, 10) << '\n';
    out << "residual rms " << format_number(residual_rms, 6) << '\n';
    if (short_series_warning) {
        out << "warning: data spans fewer than two fitted periods\n";
    }
    return out.str();
}

DeBroglieReport debroglie_report(std::span<const DeBroglieEntry> entries) {
    DeBroglieReport report;
    if (entries.empty()) return report;
    const double lambda1 = entries.front().fit.wavelength_nm;
    const double sigma1 = entries.front().fit.wavelength_sigma;

    for (const auto& entry : entries) {
        DeBroglieRow row;
        row.photons = entry.photons;
        row.wavelength_nm = entry.fit.wavelength_nm;
        row.wavelength_sigma = entry.fit.wavelength_sigma;
        row.visibility = entry.fit.visibility;
        row.ratio = lambda1 / entry.fit.wavelength_nm;
        const double rel1 = lambda1 > 0.0 ? sigma1 / lambda1 : 0.0;
        const double reln =
            entry.fit.wavelength_nm > 0.0 ? entry.fit.wavelength_sigma / entry.fit.wavelength_nm
                                          : 0.0;
        row.ratio_sigma = row.ratio * std::sqrt(rel1 * rel1 + reln * reln);
        row.deviation = row.ratio - static_cast<double>(entry.photons);
        report.rows.push_back(row);
    }
    return report;
}

std::string DeBroglieReport::text() const {
    std::ostringstream out;
    out << "  N   wavelength(nm)    visibility        ratio    deviation\n";
    for (const auto& row : rows) {
        char line[160];
        std::snprintf(line, sizeof(line), "%3d %16.6f %13.6f %12.6f %12.3e\n", row.photons,
                      row.wavelength_nm, row.visibility, row.ratio, row.deviation);
        out << line;
    }
    return out.str();
}

nlohmann::json DeBroglieReport::to_json() const {
    nlohmann::json rows_json = nlohmann::json::array();
    for (const auto& row : rows) {
        rows_json.push_back({{"photons", row.photons},
                             {"wavelength_nm", row.wavelength_nm},
                             {"wavelength_sigma_nm", row.wavelength_sigma},
                             {"visibility", row.visibility},
                             {"ratio", row.ratio},
                             {"ratio_sigma", row.ratio_sigma},
                             {"deviation", row.deviation}});
    }
    return {{"rows", rows_json}};
}

std::vector<double> harmonic_amplitudes(const FringeSeries& series,
                                        std::span<const double> wavelengths_nm) {
    const std::size_t n = series.points.size();
    const std::size_t m = wavelengths_nm.size();
    if (n < 2 * m + 1) throw ConfigError("not enough points for the requested harmonics");
    const std::size_t dim = 2 * m + 1;

    Eigen::MatrixXd normal = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim),
                                                   static_cast<Eigen::Index>(dim));
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim));
    Eigen::VectorXd basis(static_cast<Eigen::Index>(dim));
    for (const auto& point : series.points) {
        basis(0) = 1.0;
        for (std::size_t j = 0; j < m; ++j) {
            if (!(wavelengths_nm[j] > 0.0)) throw ConfigError("harmonic wavelength must be positive");
            const double phase = 2.0 * std::numbers::pi * point.optical_path_nm / wavelengths_nm[j];
            basis(static_cast<Eigen::Index>(1 + 2 * j)) = std::cos(phase);
            basis(static_cast<Eigen::Index>(2 + 2 * j)) = std::sin(phase);
        }
        normal += basis * basis.transpose();
        rhs += point.probability * basis;
    }
    const Eigen::VectorXd coeffs = normal.ldlt().solve(rhs);

    std::vector<double> amplitudes(m);
    for (std::size_t j = 0; j < m; ++j) {
        amplitudes[j] = std::hypot(coeffs(static_cast<Eigen::Index>(1 + 2 * j)),
                                   coeffs(static_cast<Eigen::Index>(2 + 2 * j)));
    }
    return amplitudes;
}

void write_xy(const FringeSeries& series, std::ostream& out) {
    const bool use_counts = series.has_counts();
    for (const auto& point : series.points) {
        char buf[80];
        if (use_counts) {
            std::snprintf(buf, sizeof(buf), "%.17g %lld\n", point.optical_path_nm,
                          static_cast<long long>(*point.counts));
        } else {
            std::snprintf(buf, sizeof(buf), "%.17g %.17g\n", point.optical_path_nm,
                          point.probability);
        }
        out << buf;
    }
}

} // namespace noonsim
