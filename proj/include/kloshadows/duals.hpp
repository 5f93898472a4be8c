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
 * @file duals.hpp
 * Frame operators and dual frames of group POVMs.
 *
 * Duals use the weighted convention D_m = w_m F^{-1} |Pi_m>> with
 * F = sum_m w_m |Pi_m>><<Pi_m|, which satisfies sum_m |D_m>><<Pi_m| = I for
 * every positive weight vector.
 */

#include <cmath>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "kloshadows/algebra.hpp"
#include "kloshadows/partition.hpp"
#include "kloshadows/povm.hpp"

namespace kloshadows {

/** Largest accepted duality residual ||sum_m |D_m>><<Pi_m| - I||_max. */
inline constexpr double kDualityTolerance = 1e-8;
inline constexpr double kDefaultConditionBound = 1e12;
inline constexpr double kDefaultProbabilityFloor = 1e-10;

struct FrameOperator {
    Matrix superoperator;
    RealVector weights;
};

namespace detail {

inline void check_effects(std::span<const Matrix> effects) {
    if (effects.empty()) throw DimensionError("empty effect list");
    const auto dim = effects.front().rows();
    for (const auto &e : effects) {
        if (e.rows() != dim || e.cols() != dim) throw DimensionError("effects differ in shape");
    }
}

inline void check_weights(std::span<const Matrix> effects, const RealVector &weights) {
    if (static_cast<std::size_t>(weights.size()) != effects.size()) {
        throw DimensionError("one weight per effect is required");
    }
    for (Eigen::Index m = 0; m < weights.size(); ++m) {
        if (!(weights(m) > 0.0) || !std::isfinite(weights(m))) {
            throw ValidationError("frame weights must be finite and strictly positive");
        }
    }
}

/** Columns are the vectorized effects. */
inline Matrix stacked_effects(std::span<const Matrix> effects) {
    const auto dim = effects.front().rows();
    Matrix v(dim * dim, static_cast<Eigen::Index>(effects.size()));
    for (std::size_t m = 0; m < effects.size(); ++m) v.col(static_cast<Eigen::Index>(m)) = vectorize(effects[m]);
    return v;
}

}  // namespace detail

inline FrameOperator frame_operator(std::span<const Matrix> effects, const RealVector &weights) {
    detail::check_effects(effects);
    detail::check_weights(effects, weights);
    const Matrix v = detail::stacked_effects(effects);
    Matrix f = v * weights.cast<Complex>().asDiagonal() * v.adjoint();
    return {(f + f.adjoint()) * 0.5, weights};
}

/** One Hermitian dual per group outcome, aligned with group_effects order. */
class DualFrame {
   public:
    DualFrame(QubitList group, std::vector<Matrix> duals, std::string provenance)
        : group_(std::move(group)), duals_(std::move(duals)), provenance_(std::move(provenance)) {
        if (duals_.empty()) throw DimensionError("DualFrame: no duals");
        const auto dim = Eigen::Index{1} << group_.size();
        for (auto &d : duals_) {
            if (d.rows() != dim || d.cols() != dim) throw DimensionError("DualFrame: dual has wrong shape");
            d = hermitize(d);
        }
    }

    const QubitList &group() const { return group_; }
    std::size_t size() const { return duals_.size(); }
    const Matrix &dual(std::size_t m) const { return duals_.at(m); }
    const std::vector<Matrix> &duals() const { return duals_; }
    const std::string &provenance() const { return provenance_; }

    friend bool operator==(const DualFrame &, const DualFrame &) = default;

   private:
    QubitList group_;
    std::vector<Matrix> duals_;
    std::string provenance_;
};

inline double duality_residual(std::span<const Matrix> effects, std::span<const Matrix> duals) {
    detail::check_effects(effects);
    if (duals.size() != effects.size()) throw DimensionError("duality_residual: count mismatch");
    const Matrix v = detail::stacked_effects(effects);
    const Matrix d = detail::stacked_effects(duals);
    const Matrix s = d * v.adjoint();
    return max_abs(s - Matrix::Identity(s.rows(), s.cols()));
}

/** Throws ValidationError unless the frame is dual to the POVM on its group. */
inline void validate_duals(const DualFrame &frame, const ProductPovm &povm) {
    const auto effects = group_effects(povm, frame.group());
    const double r = duality_residual(effects, frame.duals());
    if (!(r <= kDualityTolerance)) {
        throw ValidationError("duality residual " + std::to_string(r) + " exceeds tolerance");
    }
}

struct DualOptions {
    double condition_bound = kDefaultConditionBound;
};

/**
 * D_m = w_m F^{-1}|Pi_m>>. With B = [sqrt(w_m) vec(Pi_m)]_m we have F = B B^dagger
 * and the dual matrix equals pinv(B^dagger) diag(sqrt(w)), evaluated from a
 * Householder QR B^dagger = Q R as R^{-1} Q^dagger diag(sqrt(w)).
 * cond(F) = cond(R)^2.
 */
inline std::vector<Matrix> duals_from_weights(std::span<const Matrix> effects, const RealVector &weights,
                                              const DualOptions &options = {}) {
    detail::check_effects(effects);
    detail::check_weights(effects, weights);
    const Eigen::Index dim2 = effects.front().rows() * effects.front().rows();
    if (static_cast<Eigen::Index>(effects.size()) < dim2) {
        throw NumericalError("frame operator is singular (fewer effects than operator dimensions)");
    }
    const RealVector root = weights.cwiseSqrt();
    const Matrix bt = root.cast<Complex>().asDiagonal() * detail::stacked_effects(effects).adjoint();
    const Eigen::HouseholderQR<Matrix> qr(bt);
    const Matrix r = qr.matrixQR().topRows(dim2).triangularView<Eigen::Upper>();
    const RealVector s = Eigen::BDCSVD<Matrix>(r).singularValues();
    if (!(s(dim2 - 1) > 0.0)) {
        throw NumericalError("frame operator is singular (effects are not informationally complete)");
    }
    const double cond = (s(0) / s(dim2 - 1)) * (s(0) / s(dim2 - 1));
    if (!(cond <= options.condition_bound)) {
        throw NumericalError("frame operator condition number " + std::to_string(cond) + " exceeds bound");
    }
    const Matrix q = qr.householderQ() * Matrix::Identity(bt.rows(), dim2);
    const Matrix dual_cols =
        r.triangularView<Eigen::Upper>().solve(q.adjoint()) * root.cast<Complex>().asDiagonal();
    std::vector<Matrix> duals;
    duals.reserve(effects.size());
    for (std::size_t m = 0; m < effects.size(); ++m) {
        Matrix d = devectorize(dual_cols.col(static_cast<Eigen::Index>(m)));
        duals.push_back((d + d.adjoint()) * 0.5);
    }
    const double residual = duality_residual(effects, duals);
    if (!(residual <= kDualityTolerance)) {
        throw NumericalError("duality residual " + std::to_string(residual) + " exceeds tolerance");
    }
    return duals;
}

inline RealVector canonical_weights(std::span<const Matrix> effects) {
    RealVector w(static_cast<Eigen::Index>(effects.size()));
    for (std::size_t m = 0; m < effects.size(); ++m) {
        const double tr = effects[m].trace().real();
        if (!(tr > 0.0)) throw ValidationError("effect with non-positive trace");
        w(static_cast<Eigen::Index>(m)) = 1.0 / tr;
    }
    return w;
}

/** Weights 1 / max(p_m, floor). */
inline RealVector optimal_weights(std::span<const double> probabilities, double floor = kDefaultProbabilityFloor) {
    if (!(floor > 0.0)) throw ValidationError("probability floor must be positive");
    RealVector w(static_cast<Eigen::Index>(probabilities.size()));
    for (std::size_t m = 0; m < probabilities.size(); ++m) {
        if (!std::isfinite(probabilities[m])) throw ValidationError("non-finite probability");
        w(static_cast<Eigen::Index>(m)) = 1.0 / std::max(probabilities[m], floor);
    }
    return w;
}

/**
 * Canonical weights factorize over the qubits of a product POVM, so the group
 * frame is the tensor product of the single-qubit canonical frames.
 */
inline DualFrame canonical_duals(const ProductPovm &povm, std::span<const int> group,
                                 const DualOptions &options = {}) {
    if (group.empty()) throw DimensionError("canonical_duals: empty group");
    for (int q : group) {
        if (q < 0 || q >= povm.qubits()) throw IndexError("canonical_duals: qubit out of range");
    }
    std::vector<Matrix> duals{Matrix::Identity(1, 1)};
    for (int q : group) {
        const auto effects = povm.site(q).effects();
        const auto site = duals_from_weights(effects, canonical_weights(effects), options);
        std::vector<Matrix> next;
        next.reserve(duals.size() * site.size());
        for (const auto &d : duals) {
            for (const auto &e : site) next.push_back(kron(d, e));
        }
        duals = std::move(next);
    }
    DualFrame frame(QubitList(group.begin(), group.end()), std::move(duals), "canonical");
    validate_duals(frame, povm);
    return frame;
}

inline DualFrame optimal_duals(const ProductPovm &povm, std::span<const int> group,
                               std::span<const double> probabilities, double floor = kDefaultProbabilityFloor,
                               std::string provenance = "optimal", const DualOptions &options = {}) {
    const auto effects = group_effects(povm, group);
    if (probabilities.size() != effects.size()) {
        throw DimensionError("optimal_duals: one probability per group outcome is required");
    }
    return DualFrame(QubitList(group.begin(), group.end()),
                     duals_from_weights(effects, optimal_weights(probabilities, floor), options),
                     std::move(provenance));
}

/** Per-group dual frames over a partition; the global dual is their tensor product. */
class GlobalDuals {
   public:
    GlobalDuals(Partition partition, std::vector<DualFrame> frames)
        : partition_(std::move(partition)), frames_(std::move(frames)) {
        if (frames_.size() != partition_.size()) throw DimensionError("GlobalDuals: one frame per group is required");
        for (std::size_t g = 0; g < frames_.size(); ++g) {
            if (frames_[g].group() != partition_.groups()[g]) {
                throw ValidationError("GlobalDuals: frame groups differ from the partition");
            }
        }
    }

    int qubits() const { return partition_.qubits(); }
    const Partition &partition() const { return partition_; }
    const std::vector<DualFrame> &frames() const { return frames_; }
    const DualFrame &frame(std::size_t g) const { return frames_.at(g); }

    std::string provenance() const {
        std::string out;
        for (const auto &f : frames_) {
            if (out.find(f.provenance()) == std::string::npos) {
                if (!out.empty()) out += "+";
                out += f.provenance();
            }
        }
        return out;
    }

    friend bool operator==(const GlobalDuals &, const GlobalDuals &) = default;

   private:
    Partition partition_;
    std::vector<DualFrame> frames_;
};

inline void validate_duals(const GlobalDuals &duals, const ProductPovm &povm) {
    if (duals.qubits() != povm.qubits()) throw DimensionError("duals and POVM qubit counts differ");
    for (const auto &f : duals.frames()) validate_duals(f, povm);
}

inline GlobalDuals canonical_global_duals(const ProductPovm &povm, const Partition &partition) {
    std::vector<DualFrame> frames;
    for (const auto &g : partition.groups()) frames.push_back(canonical_duals(povm, g));
    return GlobalDuals(partition, std::move(frames));
}

/** E(D) = sum_m p_m Tr[D_m^2] - Tr[rho^2]. */
inline double state_mse(const DualFrame &frame, std::span<const double> probabilities, const Matrix &rho) {
    if (probabilities.size() != frame.size()) throw DimensionError("state_mse: probability count mismatch");
    double acc = 0.0;
    for (std::size_t m = 0; m < frame.size(); ++m) acc += probabilities[m] * frame.dual(m).squaredNorm();
    return acc - rho.squaredNorm();
}

}  // namespace kloshadows
