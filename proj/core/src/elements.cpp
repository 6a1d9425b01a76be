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

#include "noonsim/elements.hpp"

#include <array>
#include <cmath>
#include <set>

namespace noonsim {

namespace {

constexpr double kUnitaryTolerance = 1e-12;
constexpr double kMatrixZero = 1e-15;

double factorial(int n) {
    static const auto table = [] {
        std::array<double, 64> t{};
        t[0] = 1.0;
        for (std::size_t i = 1; i < t.size(); ++i) t[i] = t[i - 1] * static_cast<double>(i);
        return t;
    }();
    if (n < 0 || n >= static_cast<int>(table.size())) throw RuntimeError("factorial out of range");
    return table[static_cast<std::size_t>(n)];
}

Complex int_pow(Complex base, int exponent) {
    Complex out = 1.0;
    for (int i = 0; i < exponent; ++i) out *= base;
    return out;
}

} // namespace

ModeTransform::ModeTransform(RegistryPtr registry, Eigen::MatrixXcd matrix)
    : registry_(std::move(registry)), matrix_(std::move(matrix)) {
    if (!registry_) throw ConfigError("mode transform requires a registry");
    const auto n = static_cast<Eigen::Index>(registry_->size());
    if (matrix_.rows() != n || matrix_.cols() != n) {
        throw ConfigError("mode transform matrix does not match registry size");
    }
    const double defect =
        (matrix_.adjoint() * matrix_ - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff();
    if (defect > kUnitaryTolerance) {
        throw ConfigError("mode transform is not unitary (defect " + std::to_string(defect) + ")");
    }
    std::set<std::size_t> touched;
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index k = 0; k < n; ++k) {
            const Complex expected = (k == j) ? Complex{1.0} : Complex{0.0};
            if (std::abs(matrix_(k, j) - expected) > kMatrixZero) {
                touched.insert(static_cast<std::size_t>(j));
                touched.insert(static_cast<std::size_t>(k));
            }
        }
    }
    touched_.assign(touched.begin(), touched.end());
}

ModeTransform ModeTransform::identity(RegistryPtr registry) {
    const auto n = static_cast<Eigen::Index>(registry->size());
    return ModeTransform(std::move(registry), Eigen::MatrixXcd::Identity(n, n));
}

ModeTransform ModeTransform::then(const ModeTransform& next) const {
    if (registry_ != next.registry_) throw ConfigError("composing transforms across registries");
    return ModeTransform(registry_, next.matrix_ * matrix_);
}

ModeTransform beamsplitter(const RegistryPtr& registry, const ModeId& m1, const ModeId& m2,
                           double reflectivity) {
    if (!(reflectivity >= 0.0 && reflectivity <= 1.0)) {
        throw ConfigError("beamsplitter reflectivity must be in [0, 1]");
    }
    if (m1 == m2) throw ConfigError("beamsplitter needs two distinct modes");
    const auto i1 = static_cast<Eigen::Index>(registry->index_of(m1));
    const auto i2 = static_cast<Eigen::Index>(registry->index_of(m2));
    const double t = std::sqrt(1.0 - reflectivity);
    const Complex ir{0.0, std::sqrt(reflectivity)};

    const auto n = static_cast<Eigen::Index>(registry->size());
    Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(n, n);
    u(i1, i1) = t;
    u(i2, i2) = t;
    u(i2, i1) = ir;
    u(i1, i2) = ir;
    return ModeTransform(registry, std::move(u));
}

ModeTransform pbs(const RegistryPtr& registry, const std::string& in1, const std::string& in2,
                  const std::string& out1, const std::string& out2, PbsConvention convention) {
    const std::set<std::string> labels{in1, in2, out1, out2};
    if (labels.size() != 4) throw ConfigError("pbs needs four distinct spatial labels");
    const Complex r = convention == PbsConvention::real_reflection ? Complex{1.0} : Complex{0.0, 1.0};

    auto h = [&](const std::string& s) {
        return static_cast<Eigen::Index>(registry->index_of({s, Polarization::H}));
    };
    auto v = [&](const std::string& s) {
        return static_cast<Eigen::Index>(registry->index_of({s, Polarization::V}));
    };

    const auto n = static_cast<Eigen::Index>(registry->size());
    Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(n, n);
    auto route = [&](Eigen::Index from, Eigen::Index to, Complex phase) {
        u(from, from) = 0.0;
        u(to, to) = 0.0;
        u(to, from) = phase;
        u(from, to) = phase; // unitary completion: outputs route back the same way
    };
    route(h(in1), h(out1), 1.0);
    route(h(in2), h(out2), 1.0);
    route(v(in1), v(out2), r);
    route(v(in2), v(out1), r);
    return ModeTransform(registry, std::move(u));
}

ModeTransform phase_shift(const RegistryPtr& registry, std::span<const ModeId> modes, double phi) {
    const auto n = static_cast<Eigen::Index>(registry->size());
    Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(n, n);
    const Complex phase = std::polar(1.0, phi);
    for (const auto& mode : modes) {
        const auto idx = static_cast<Eigen::Index>(registry->index_of(mode));
        u(idx, idx) = phase;
    }
    return ModeTransform(registry, std::move(u));
}

ModeTransform polarization_rotation(const RegistryPtr& registry, const std::string& spatial,
                                    double theta) {
    const auto ih = static_cast<Eigen::Index>(registry->index_of({spatial, Polarization::H}));
    const auto iv = static_cast<Eigen::Index>(registry->index_of({spatial, Polarization::V}));
    const auto n = static_cast<Eigen::Index>(registry->size());
    Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(n, n);
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    u(ih, ih) = c;
    u(ih, iv) = s;
    u(iv, ih) = -s;
    u(iv, iv) = c;
    return ModeTransform(registry, std::move(u));
}

namespace {

/// Expands one basis term through the touched block of a unitary,
/// distributing each input mode's photons over the nonzero rows of its
/// column and accumulating the resulting occupation patterns.
class TermExpander {
public:
    TermExpander(const Eigen::MatrixXcd& u, std::span<const std::size_t> touched, Ket& out)
        : touched_(touched), out_(out) {
        columns_.resize(touched.size());
        for (std::size_t j = 0; j < touched.size(); ++j) {
            for (std::size_t k = 0; k < touched.size(); ++k) {
                const Complex v = u(static_cast<Eigen::Index>(touched[k]),
                                    static_cast<Eigen::Index>(touched[j]));
                if (std::abs(v) > kMatrixZero) columns_[j].emplace_back(k, v);
            }
        }
        local_occ_.resize(touched.size(), 0);
    }

    void expand(const FockBasisState& state, Complex amplitude) {
        base_ = state;
        double in_factorials = 1.0;
        input_.clear();
        for (std::size_t j = 0; j < touched_.size(); ++j) {
            const int nj = base_.occupation(touched_[j]);
            if (nj > 0) {
                input_.emplace_back(j, nj);
                in_factorials *= factorial(nj);
                base_.add(touched_[j], -nj);
            }
        }
        std::fill(local_occ_.begin(), local_occ_.end(), 0);
        expand_column(0, amplitude / std::sqrt(in_factorials));
    }

private:
    void expand_column(std::size_t input_pos, Complex coeff) {
        if (input_pos == input_.size()) {
            emit(coeff);
            return;
        }
        const auto [col, photons] = input_[input_pos];
        distribute(input_pos, 0, photons, coeff * factorial(photons));
    }

    void distribute(std::size_t input_pos, std::size_t entry_pos, int remaining, Complex coeff) {
        const auto& entries = columns_[input_[input_pos].first];
        if (entries.empty()) return; // zero column block: no contribution
        if (entry_pos + 1 == entries.size()) {
            place(input_pos, entry_pos, remaining, coeff);
            return;
        }
        for (int p = 0; p <= remaining; ++p) {
            place_partial(input_pos, entry_pos, p, remaining - p, coeff);
        }
    }

    void place_partial(std::size_t input_pos, std::size_t entry_pos, int p, int remaining,
                       Complex coeff) {
        const auto& [row, value] = columns_[input_[input_pos].first][entry_pos];
        if (p > 0) coeff *= int_pow(value, p) / factorial(p);
        local_occ_[row] += p;
        distribute(input_pos, entry_pos + 1, remaining, coeff);
        local_occ_[row] -= p;
    }

    void place(std::size_t input_pos, std::size_t entry_pos, int p, Complex coeff) {
        const auto& [row, value] = columns_[input_[input_pos].first][entry_pos];
        if (p > 0) coeff *= int_pow(value, p) / factorial(p);
        local_occ_[row] += p;
        expand_column(input_pos + 1, coeff);
        local_occ_[row] -= p;
    }

    void emit(Complex coeff) {
        double out_factorials = 1.0;
        FockBasisState result = base_;
        for (std::size_t k = 0; k < touched_.size(); ++k) {
            if (local_occ_[k] > 0) {
                out_factorials *= factorial(local_occ_[k]);
                result.add(touched_[k], local_occ_[k]);
            }
        }
        out_.add_term(result, coeff * std::sqrt(out_factorials));
    }

    std::span<const std::size_t> touched_;
    Ket& out_;
    std::vector<std::vector<std::pair<std::size_t, Complex>>> columns_;
    std::vector<std::pair<std::size_t, int>> input_; // (local column, photons)
    std::vector<int> local_occ_;
    FockBasisState base_;
};

} // namespace

Ket apply_transform(const Ket& ket, const ModeTransform& transform) {
    if (ket.registry() != transform.registry()) {
        throw ConfigError("transform and ket use different registries");
    }
    if (transform.touched_modes().empty()) return ket;

    Ket out(ket.registry());
    TermExpander expander(transform.matrix(), transform.touched_modes(), out);
    for (const auto& [state, amp] : ket.terms()) {
        expander.expand(state.resized(ket.registry()->size()), amp);
    }
    out.prune();
    return out;
}

} // namespace noonsim
