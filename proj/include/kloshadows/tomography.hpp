// Copyright 2026 The kloshadows Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

/**
 * @file tomography.hpp
 * Reconstruction of group states (or surrogate outcome distributions) from
 * marginal counts.
 */

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "kloshadows/algebra.hpp"
#include "kloshadows/duals.hpp"
#include "kloshadows/povm.hpp"
#include "kloshadows/sampling.hpp"

namespace kloshadows {

/** Frequencies mixed with S_bias pseudo-counts spread uniformly over outcomes. */
struct FrequencyBias {
    double s_bias = 0.0;
};

/** Linear inversion with canonical duals, then projection onto density matrices. */
struct LinearInversionPsd {};

/**
 * Projected subgradient descent on sum_m |f_m - Tr[sigma Pi_m]| over density
 * matrices, started from the LinearInversionPsd state. Step t (from 1) moves
 * eta0 / sqrt(t) along the normalized subgradient. Stops when the best
 * residual has improved by less than `tolerance` over `window` iterations.
 */
struct ConstrainedLad {
    int max_iters = 5000;
    double tolerance = 1e-7;
    double eta0 = 1.0;
    int window = 100;
};

using TomographyBackend = std::variant<FrequencyBias, LinearInversionPsd, ConstrainedLad>;

inline std::string backend_name(const TomographyBackend &backend) {
    struct Visitor {
        std::string operator()(const FrequencyBias &) const { return "bias"; }
        std::string operator()(const LinearInversionPsd &) const { return "psd"; }
        std::string operator()(const ConstrainedLad &) const { return "lad"; }
    };
    return std::visit(Visitor{}, backend);
}

struct ReconstructionReport {
    double residual = 0.0;
    int iterations = 0;
    bool converged = true;
    std::string backend;
};

struct Reconstruction {
    std::optional<DensityMatrix> state;
    std::vector<double> probabilities;
    ReconstructionReport report;
};

struct TomographyOptions {
    int max_group_qubits = 4;
};

/** Tr[Pi_m sigma] for every group outcome. */
inline std::vector<double> predicted_probabilities(const Matrix &sigma, std::span<const Matrix> effects) {
    detail::check_effects(effects);
    if (sigma.rows() != effects.front().rows() || sigma.cols() != sigma.rows()) {
        throw DimensionError("predicted_probabilities: state and effects differ in shape");
    }
    std::vector<double> p(effects.size());
    for (std::size_t m = 0; m < effects.size(); ++m) p[m] = trace_product_real(effects[m], sigma);
    return p;
}

/** sum_m |f_m - p_m|. */
inline double l1_residual(std::span<const double> f, std::span<const double> p) {
    if (f.size() != p.size()) throw DimensionError("l1_residual: length mismatch");
    double r = 0.0;
    for (std::size_t m = 0; m < f.size(); ++m) r += std::abs(f[m] - p[m]);
    return r;
}

/** sum_m f_m D_m; Hermitian but not necessarily PSD. */
inline Matrix linear_inversion(std::span<const double> frequencies, const DualFrame &canonical) {
    if (frequencies.size() != canonical.size()) throw DimensionError("linear_inversion: count mismatch");
    const auto dim = canonical.dual(0).rows();
    Matrix out = Matrix::Zero(dim, dim);
    for (std::size_t m = 0; m < frequencies.size(); ++m) out += frequencies[m] * canonical.dual(m);
    return (out + out.adjoint()) * 0.5;
}

inline Matrix linear_inversion(const MarginalTable &table, const DualFrame &canonical) {
    const auto f = table.frequencies();
    return linear_inversion(f, canonical);
}

namespace detail {

struct LadResult {
    Matrix state;
    double residual;
    int iterations;
    bool converged;
};

inline LadResult constrained_lad(std::span<const double> f, std::span<const Matrix> effects, const Matrix &start,
                                 const ConstrainedLad &opt) {
    if (!(opt.tolerance > 0.0) || opt.max_iters < 0 || opt.window < 1 || !(opt.eta0 > 0.0)) {
        throw ValidationError("invalid ConstrainedLad settings");
    }
    const Matrix v = stacked_effects(effects);
    const auto dim = start.rows();
    const auto residual_of = [&](const Matrix &sigma, Eigen::VectorXd &sign) {
        const Vector p = v.adjoint() * vectorize(sigma);
        double r = 0.0;
        for (Eigen::Index m = 0; m < p.size(); ++m) {
            const double diff = f[static_cast<std::size_t>(m)] - p(m).real();
            r += std::abs(diff);
            sign(m) = diff > 0.0 ? 1.0 : (diff < 0.0 ? -1.0 : 0.0);
        }
        return r;
    };
    Eigen::VectorXd sign(v.cols());
    Matrix sigma = start;
    double current = residual_of(sigma, sign);
    LadResult best{sigma, current, 0, false};
    double window_start = current;
    int t = 0;
    while (t < opt.max_iters) {
        ++t;
        // Subgradient of the residual is -sum_m sign_m Pi_m.
        const Matrix g = devectorize(v * sign.cast<Complex>()) * Complex(-1.0);
        const double gnorm = g.norm();
        if (gnorm == 0.0) {
            best.converged = true;
            break;
        }
        Matrix step = sigma - (opt.eta0 / std::sqrt(static_cast<double>(t)) / gnorm) * g;
        sigma = project_to_density((step + step.adjoint()) * 0.5);
        current = residual_of(sigma, sign);
        if (current < best.residual) {
            best.state = sigma;
            best.residual = current;
        }
        if (t % opt.window == 0) {
            if (window_start - best.residual < opt.tolerance) {
                best.converged = true;
                break;
            }
            window_start = best.residual;
        }
    }
    best.iterations = t;
    (void)dim;
    return best;
}

}  // namespace detail

/** Reconstructs one group from its marginal table with the chosen backend. */
inline Reconstruction reconstruct(const MarginalTable &table, const ProductPovm &povm,
                                  const TomographyBackend &backend, const TomographyOptions &options = {}) {
    if (static_cast<int>(table.group.size()) > options.max_group_qubits) {
        throw CapacityError("group of " + std::to_string(table.group.size()) + " qubits exceeds the tomography cap");
    }
    if (table.shots == 0) throw ValidationError("reconstruct: no shots");
    const auto effects = group_effects(povm, table.group);
    if (effects.size() != table.counts.size()) throw DimensionError("reconstruct: table and POVM differ");
    const auto f = table.frequencies();
    Reconstruction out;
    out.report.backend = backend_name(backend);

    if (const auto *bias = std::get_if<FrequencyBias>(&backend)) {
        if (!(bias->s_bias >= 0.0) || !std::isfinite(bias->s_bias)) {
            throw ValidationError("S_bias must be finite and non-negative");
        }
        const double m = static_cast<double>(table.counts.size());
        const double s = static_cast<double>(table.shots);
        out.probabilities.resize(table.counts.size());
        for (std::size_t j = 0; j < table.counts.size(); ++j) {
            out.probabilities[j] = (static_cast<double>(table.counts[j]) + bias->s_bias / m) / (s + bias->s_bias);
        }
        out.report.residual = l1_residual(f, out.probabilities);
        return out;
    }

    const DualFrame canonical = canonical_duals(povm, table.group);
    Matrix sigma = project_to_density(linear_inversion(f, canonical));
    if (const auto *lad = std::get_if<ConstrainedLad>(&backend)) {
        auto result = detail::constrained_lad(f, effects, sigma, *lad);
        sigma = std::move(result.state);
        out.report.iterations = result.iterations;
        out.report.converged = result.converged;
    }
    out.probabilities = predicted_probabilities(sigma, effects);
    out.report.residual = l1_residual(f, out.probabilities);
    out.state = DensityMatrix(sigma);
    return out;
}

}  // namespace kloshadows
