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

#include <cmath>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "kloshadows/algebra.hpp"

namespace kloshadows {

/**
 * Number of linearly independent operators among the effects, i.e. the
 * rank of the stacked vectorized effects. A single-qubit set is
 * informationally complete iff this equals 4.
 */
inline std::size_t completeness_rank(std::span<const Matrix> effects,
                                     double tolerance = 1e-10) {
    if (effects.empty()) return 0;
    const auto dim2 = effects.front().size();
    Matrix stacked(static_cast<Eigen::Index>(effects.size()), dim2);
    for (std::size_t m = 0; m < effects.size(); ++m) {
        stacked.row(static_cast<Eigen::Index>(m)) = vectorize(effects[m]).transpose();
    }
    Eigen::JacobiSVD<Matrix> svd(stacked);
    const RealVector s = svd.singularValues();
    if (s.size() == 0 || s(0) == 0.0) return 0;
    std::size_t rank = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        if (s(i) > tolerance * s(0)) ++rank;
    }
    return rank;
}

/**
 * Informationally complete single-qubit POVM. Construction checks that every
 * effect is PSD, that the effects sum to the identity, and that they span
 * the operator space. Also keeps the Lüders operators sqrt(effect) used for
 * post-measurement collapse.
 */
class LocalPovm {
   public:
    LocalPovm(std::vector<Matrix> effects, std::string id)
        : effects_(std::move(effects)), id_(std::move(id)) {
        if (effects_.size() < 4) {
            throw ValidationError("a local IC-POVM needs at least 4 effects");
        }
        if (effects_.size() > 255) {
            throw ValidationError("at most 255 outcomes per qubit are supported");
        }
        Matrix total = Matrix::Zero(2, 2);
        for (auto &e : effects_) {
            if (e.rows() != 2 || e.cols() != 2) {
                throw DimensionError("local POVM effects must be 2x2");
            }
            e = hermitize(e);
            const auto eig = hermitian_eig(e);
            if (eig.values.minCoeff() < -1e-12) {
                throw ValidationError("POVM effect is not positive semidefinite");
            }
            const RealVector root = eig.values.cwiseMax(0.0).cwiseSqrt();
            kraus_.push_back(eig.vectors * root.cast<Complex>().asDiagonal() *
                             eig.vectors.adjoint());
            total += e;
        }
        if (max_abs(total - Matrix::Identity(2, 2)) > 1e-12) {
            throw ValidationError("POVM effects do not sum to the identity");
        }
        if (completeness_rank(effects_) != 4) {
            throw ValidationError("POVM is not informationally complete");
        }
    }

    std::size_t size() const { return effects_.size(); }
    const Matrix &effect(std::size_t m) const { return effects_.at(m); }
    std::span<const Matrix> effects() const { return effects_; }
    /** sqrt(effect m). */
    const Matrix &kraus(std::size_t m) const { return kraus_.at(m); }
    const std::string &id() const { return id_; }

   private:
    std::vector<Matrix> effects_;
    std::vector<Matrix> kraus_;
    std::string id_;
};

/**
 * Random single-qubit Pauli measurement as a six-outcome POVM. Outcome order
 * is |0>,|1>,|+>,|->,|+i>,|-i>, each projector scaled by 1/3. The order is
 * part of the on-disk dataset format.
 */
inline LocalPovm pauli6() {
    const double s = 1.0 / std::sqrt(2.0);
    const Complex i(0.0, 1.0);
    const std::vector<Vector> kets = {
        (Vector(2) << 1.0, 0.0).finished(), (Vector(2) << 0.0, 1.0).finished(),
        (Vector(2) << s, s).finished(),     (Vector(2) << s, -s).finished(),
        (Vector(2) << s, s * i).finished(), (Vector(2) << s, -s * i).finished()};
    std::vector<Matrix> effects;
    for (const auto &k : kets) effects.push_back(k * k.adjoint() / 3.0);
    return LocalPovm(std::move(effects), "pauli6");
}

/** Tensor-product POVM over n qubits, one local POVM per qubit. */
class ProductPovm {
   public:
    explicit ProductPovm(std::vector<LocalPovm> sites) : sites_(std::move(sites)) {
        if (sites_.empty()) throw ValidationError("product POVM needs at least one qubit");
    }

    static ProductPovm uniform(const LocalPovm &local, int qubits) {
        if (qubits < 1) throw ValidationError("qubit count must be positive");
        return ProductPovm(std::vector<LocalPovm>(static_cast<std::size_t>(qubits), local));
    }

    int qubits() const { return static_cast<int>(sites_.size()); }
    const LocalPovm &site(int q) const { return sites_.at(static_cast<std::size_t>(q)); }
    int outcomes(int q) const { return static_cast<int>(site(q).size()); }

    /** Outcome count shared by all qubits; throws when the sites differ. */
    int uniform_outcomes() const {
        const int d = outcomes(0);
        for (int q = 1; q < qubits(); ++q) {
            if (outcomes(q) != d) {
                throw ValidationError("product POVM has qubit-dependent outcome counts");
            }
        }
        return d;
    }

    /** Identifier of the local POVM when all qubits share it, else "mixed". */
    std::string id() const {
        for (const auto &s : sites_) {
            if (s.id() != sites_.front().id()) return "mixed";
        }
        return sites_.front().id();
    }

   private:
    std::vector<LocalPovm> sites_;
};

/** Number of joint outcomes of a group: product of per-qubit counts. */
inline std::size_t group_outcome_count(const ProductPovm &povm,
                                       std::span<const int> group) {
    std::size_t total = 1;
    for (int q : group) total *= static_cast<std::size_t>(povm.outcomes(q));
    return total;
}

/** Per-qubit outcomes of a group outcome flattened row-major in group order. */
inline std::vector<int> unflatten_outcome(const ProductPovm &povm,
                                          std::span<const int> group,
                                          std::size_t flat) {
    std::vector<int> idx(group.size());
    for (std::size_t j = group.size(); j-- > 0;) {
        const auto d = static_cast<std::size_t>(povm.outcomes(group[j]));
        idx[j] = static_cast<int>(flat % d);
        flat /= d;
    }
    return idx;
}

/** Tensor product of the listed single-qubit effects in group order. */
inline Matrix group_effect(const ProductPovm &povm, std::span<const int> group,
                           std::span<const int> idx) {
    check_qubit_subset(group, povm.qubits());
    if (idx.size() != group.size()) {
        throw DimensionError("group_effect: one outcome index per qubit required");
    }
    Matrix out = Matrix::Identity(1, 1);
    for (std::size_t j = 0; j < group.size(); ++j) {
        const auto &local = povm.site(group[j]);
        if (idx[j] < 0 || static_cast<std::size_t>(idx[j]) >= local.size()) {
            throw IndexError("outcome index " + std::to_string(idx[j]) +
                             " out of range for qubit " + std::to_string(group[j]));
        }
        out = kron(out, local.effect(static_cast<std::size_t>(idx[j])));
    }
    return out;
}

/** All effects of a group, indexed by flattened group outcome. */
inline std::vector<Matrix> group_effects(const ProductPovm &povm,
                                         std::span<const int> group) {
    check_qubit_subset(group, povm.qubits());
    std::vector<Matrix> out{Matrix::Identity(1, 1)};
    for (int q : group) {
        const auto &local = povm.site(q);
        std::vector<Matrix> next;
        next.reserve(out.size() * local.size());
        for (const auto &prefix : out) {
            for (const auto &e : local.effects()) next.push_back(kron(prefix, e));
        }
        out = std::move(next);
    }
    return out;
}

}  // namespace kloshadows
