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
 * @file states.hpp
 * Dense quantum states: statevectors, density matrices and block-product
 * states built from reduced density matrices of a qubit partition.
 */

#include <cmath>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "kloshadows/algebra.hpp"
#include "kloshadows/partition.hpp"
#include "kloshadows/pauli.hpp"
#include "kloshadows/povm.hpp"

namespace kloshadows {

/** Hard qubit caps for dense representations. */
struct DenseLimits {
    int statevector_qubits = 14;
    int density_qubits = 12;
};

class PureState {
   public:
    explicit PureState(Vector amplitudes, int max_qubits = DenseLimits{}.statevector_qubits)
        : amplitudes_(std::move(amplitudes)) {
        qubits_ = qubits_for_dimension(amplitudes_.size());
        if (qubits_ > max_qubits) {
            throw CapacityError("statevector on " + std::to_string(qubits_) +
                                " qubits exceeds the cap of " + std::to_string(max_qubits));
        }
        if (std::abs(amplitudes_.norm() - 1.0) > 1e-10) {
            throw ValidationError("statevector is not normalized");
        }
    }

    int qubits() const { return qubits_; }
    const Vector &amplitudes() const { return amplitudes_; }
    Matrix density() const { return amplitudes_ * amplitudes_.adjoint(); }

   private:
    Vector amplitudes_;
    int qubits_ = 0;
};

class DensityMatrix {
   public:
    explicit DensityMatrix(const Matrix &rho, int max_qubits = DenseLimits{}.density_qubits) {
        matrix_ = hermitize(rho);
        qubits_ = qubits_for_dimension(matrix_.rows());
        if (qubits_ > max_qubits) {
            throw CapacityError("density matrix on " + std::to_string(qubits_) +
                                " qubits exceeds the cap of " + std::to_string(max_qubits));
        }
        if (std::abs(matrix_.trace().real() - 1.0) > 1e-10) {
            throw ValidationError("density matrix does not have unit trace");
        }
        Eigen::SelfAdjointEigenSolver<Matrix> solver(matrix_, Eigen::EigenvaluesOnly);
        if (solver.eigenvalues().minCoeff() < -1e-10) {
            throw ValidationError("density matrix is not positive semidefinite");
        }
    }

    static DensityMatrix maximally_mixed(int qubits) {
        const auto dim = Eigen::Index{1} << qubits;
        return DensityMatrix(Matrix::Identity(dim, dim) / static_cast<double>(dim));
    }

    int qubits() const { return qubits_; }
    const Matrix &matrix() const { return matrix_; }

   private:
    Matrix matrix_;
    int qubits_ = 0;
};

/** Tensor product of per-group density matrices over a partition. */
class BlockProductState {
   public:
    BlockProductState(Partition partition, std::vector<DensityMatrix> blocks)
        : partition_(std::move(partition)), blocks_(std::move(blocks)) {
        if (blocks_.size() != partition_.size()) {
            throw DimensionError("one block per partition group required");
        }
        for (std::size_t g = 0; g < blocks_.size(); ++g) {
            if (blocks_[g].qubits() != static_cast<int>(partition_.groups()[g].size())) {
                throw DimensionError("block " + std::to_string(g) +
                                     " does not match its group size");
            }
        }
    }

    int qubits() const { return partition_.qubits(); }
    const Partition &partition() const { return partition_; }
    const std::vector<DensityMatrix> &blocks() const { return blocks_; }

   private:
    Partition partition_;
    std::vector<DensityMatrix> blocks_;
};

using State = std::variant<PureState, DensityMatrix, BlockProductState>;

inline int state_qubits(const State &state) {
    return std::visit([](const auto &s) { return s.qubits(); }, state);
}

/** Dense density matrix of any state (subject to the density cap). */
inline DensityMatrix to_density(const State &state,
                                int max_qubits = DenseLimits{}.density_qubits) {
    if (state_qubits(state) > max_qubits) {
        throw CapacityError("state exceeds the dense density-matrix cap");
    }
    if (const auto *pure = std::get_if<PureState>(&state)) {
        return DensityMatrix(pure->density(), max_qubits);
    }
    if (const auto *rho = std::get_if<DensityMatrix>(&state)) return *rho;
    const auto &block = std::get<BlockProductState>(state);
    Matrix joint = Matrix::Identity(1, 1);
    std::vector<int> position(static_cast<std::size_t>(block.qubits()));
    int next = 0;
    for (std::size_t g = 0; g < block.blocks().size(); ++g) {
        joint = kron(joint, block.blocks()[g].matrix());
        for (int q : block.partition().groups()[g]) position[static_cast<std::size_t>(q)] = next++;
    }
    return DensityMatrix(permute_qubits(joint, position), max_qubits);
}

namespace detail {

inline double clamp_probability(double p) { return std::clamp(p, 0.0, 1.0); }

inline double group_probability(const Matrix &rho, const ProductPovm &povm,
                                std::span<const int> group, std::span<const int> outcome) {
    std::vector<int> idx;
    for (int q : group) idx.push_back(outcome[static_cast<std::size_t>(q)]);
    return trace_product_real(group_effect(povm, group, idx), rho);
}

}  // namespace detail

/** Born probability Tr[Pi_m rho] of a full n-qubit outcome, clamped to [0, 1]. */
inline double outcome_probability(const State &state, const ProductPovm &povm,
                                  std::span<const int> outcome) {
    const int n = state_qubits(state);
    if (povm.qubits() != n || static_cast<int>(outcome.size()) != n) {
        throw DimensionError("outcome_probability: qubit counts do not match");
    }
    for (int q = 0; q < n; ++q) {
        if (outcome[static_cast<std::size_t>(q)] < 0 ||
            outcome[static_cast<std::size_t>(q)] >= povm.outcomes(q)) {
            throw IndexError("outcome index out of range on qubit " + std::to_string(q));
        }
    }
    if (const auto *pure = std::get_if<PureState>(&state)) {
        Vector phi = pure->amplitudes();
        for (int q = 0; q < n; ++q) {
            const int one[1] = {q};
            apply_on_qubits(povm.site(q).effect(static_cast<std::size_t>(outcome[static_cast<std::size_t>(q)])),
                            one, phi);
        }
        return detail::clamp_probability(pure->amplitudes().dot(phi).real());
    }
    if (const auto *rho = std::get_if<DensityMatrix>(&state)) {
        Matrix m = rho->matrix();
        for (int q = 0; q < n; ++q) {
            const int one[1] = {q};
            apply_on_qubits(povm.site(q).effect(static_cast<std::size_t>(outcome[static_cast<std::size_t>(q)])),
                            one, m);
        }
        return detail::clamp_probability(m.trace().real());
    }
    const auto &block = std::get<BlockProductState>(state);
    double p = 1.0;
    for (std::size_t g = 0; g < block.blocks().size(); ++g) {
        p *= detail::group_probability(block.blocks()[g].matrix(), povm,
                                       block.partition().groups()[g], outcome);
    }
    return detail::clamp_probability(p);
}

/** Reduced density matrix on an ascending qubit group. */
inline DensityMatrix reduced_density(const State &state, std::span<const int> group) {
    const int n = state_qubits(state);
    check_qubit_subset(group, n);
    if (group.empty()) throw DimensionError("reduced_density: empty group");
    if (const auto *pure = std::get_if<PureState>(&state)) {
        const auto kept = detail::scatter_offsets(group, n);
        const auto rest = detail::scatter_offsets(detail::complement(group, n), n);
        const auto dk = static_cast<Eigen::Index>(kept.size());
        const Vector &psi = pure->amplitudes();
        Matrix out = Matrix::Zero(dk, dk);
        for (auto r : rest) {
            Vector slice(dk);
            for (Eigen::Index a = 0; a < dk; ++a) slice(a) = psi(static_cast<Eigen::Index>(r | kept[a]));
            out.noalias() += slice * slice.adjoint();
        }
        return DensityMatrix(out);
    }
    if (const auto *rho = std::get_if<DensityMatrix>(&state)) {
        return DensityMatrix(partial_trace(rho->matrix(), group));
    }
    const auto &block = std::get<BlockProductState>(state);
    Matrix joint = Matrix::Identity(1, 1);
    std::vector<int> concat;
    for (std::size_t g = 0; g < block.blocks().size(); ++g) {
        const auto &members = block.partition().groups()[g];
        QubitList local;
        for (std::size_t j = 0; j < members.size(); ++j) {
            if (std::find(group.begin(), group.end(), members[j]) != group.end()) {
                local.push_back(static_cast<int>(j));
                concat.push_back(members[j]);
            }
        }
        if (local.empty()) continue;
        joint = kron(joint, partial_trace(block.blocks()[g].matrix(), local));
    }
    // concat lists the original qubit at each position of `joint`.
    std::vector<int> order(concat.size());
    for (std::size_t j = 0; j < group.size(); ++j) {
        order[j] = static_cast<int>(std::find(concat.begin(), concat.end(), group[j]) - concat.begin());
    }
    return DensityMatrix(permute_qubits(joint, order));
}

/** Tensor product of the reduced states over the partition's groups. */
inline BlockProductState grouped_product_state(const State &state, const Partition &partition) {
    if (partition.qubits() != state_qubits(state)) {
        throw DimensionError("grouped_product_state: partition size mismatch");
    }
    std::vector<DensityMatrix> blocks;
    for (const auto &g : partition.groups()) blocks.push_back(reduced_density(state, g));
    return BlockProductState(partition, std::move(blocks));
}

/** Exact expectation value Tr[rho O]. */
inline double expectation(const State &state, const PauliObservable &obs) {
    if (obs.qubits() != state_qubits(state)) {
        throw DimensionError("expectation: qubit counts do not match");
    }
    if (const auto *pure = std::get_if<PureState>(&state)) {
        const Vector &psi = pure->amplitudes();
        double total = 0.0;
        for (const auto &t : obs.terms()) {
            const auto m = pauli_masks(t.word);
            Complex acc = 0.0;
            for (Eigen::Index j = 0; j < psi.size(); ++j) {
                acc += std::conj(psi(static_cast<Eigen::Index>(j ^ m.x))) *
                       pauli_phase(m, static_cast<std::uint64_t>(j)) * psi(j);
            }
            total += t.coefficient * acc.real();
        }
        return total;
    }
    const Matrix rho = to_density(state).matrix();
    double total = 0.0;
    for (const auto &t : obs.terms()) total += t.coefficient * trace_with_pauli(rho, t.word);
    return total;
}

struct GroundState {
    double energy = 0.0;
    PureState state;
};

/**
 * Lowest eigenpair of the dense Hamiltonian. The global phase is fixed so
 * that the largest-magnitude amplitude is real and positive.
 */
inline GroundState ground_state(const PauliObservable &hamiltonian, int max_qubits = 12) {
    const Matrix h = hamiltonian.matrix(max_qubits);
    Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
    if (solver.info() != Eigen::Success) throw NumericalError("ground_state: eigensolver failed");
    Vector psi = solver.eigenvectors().col(0);
    Eigen::Index arg = 0;
    psi.cwiseAbs().maxCoeff(&arg);
    psi *= std::conj(psi(arg)) / std::abs(psi(arg));
    psi /= psi.norm();
    return {solver.eigenvalues()(0), PureState(psi, max_qubits)};
}

// ---------------------------------------------------------------------------
// Named states used by benchmarks and toy models.

/** Product state from letters 0, 1, + (|+>), - (|->), r (|+i>), l (|-i>). */
inline PureState product_state(std::string_view letters) {
    const double s = 1.0 / std::sqrt(2.0);
    const Complex i(0.0, 1.0);
    Vector psi = Vector::Ones(1);
    for (char c : letters) {
        Vector k(2);
        switch (c) {
            case '0': k << 1.0, 0.0; break;
            case '1': k << 0.0, 1.0; break;
            case '+': k << s, s; break;
            case '-': k << s, -s; break;
            case 'r': k << s, s * i; break;
            case 'l': k << s, -s * i; break;
            default: throw ValidationError(std::string("unknown product-state letter '") + c + "'");
        }
        Vector next(psi.size() * 2);
        for (Eigen::Index a = 0; a < psi.size(); ++a) next.segment(2 * a, 2) = psi(a) * k;
        psi = next;
    }
    return PureState(psi);
}

/** (|0...0> + |1...1>)/sqrt(2) on n >= 2 qubits. */
inline PureState ghz_state(int qubits) {
    if (qubits < 2) throw ValidationError("GHZ state needs at least 2 qubits");
    Vector psi = Vector::Zero(Eigen::Index{1} << qubits);
    psi(0) = psi(psi.size() - 1) = 1.0 / std::sqrt(2.0);
    return PureState(psi);
}

inline PureState bell_state() { return ghz_state(2); }

/** `pairs` independent Bell pairs on qubits (0,1), (2,3), ... */
inline BlockProductState bell_pairs(int pairs) {
    std::vector<QubitList> groups;
    std::vector<DensityMatrix> blocks;
    for (int p = 0; p < pairs; ++p) {
        groups.push_back({2 * p, 2 * p + 1});
        blocks.emplace_back(bell_state().density());
    }
    return BlockProductState(Partition(2 * pairs, groups), std::move(blocks));
}

inline BlockProductState maximally_mixed_state(int qubits) {
    std::vector<DensityMatrix> blocks(static_cast<std::size_t>(qubits),
                                      DensityMatrix::maximally_mixed(1));
    return BlockProductState(Partition::singletons(qubits), std::move(blocks));
}

/** (1-q)|00><00| + q|11><11|. */
inline DensityMatrix classical_mixture_toy(double q) {
    if (q < 0.0 || q > 1.0) throw ValidationError("toy parameter q must lie in [0, 1]");
    Matrix rho = Matrix::Zero(4, 4);
    rho(0, 0) = 1.0 - q;
    rho(3, 3) = q;
    return DensityMatrix(rho);
}

/** sqrt(1-q^2)|00> + q|11>. */
inline PureState weighted_bell_toy(double q) {
    if (q < 0.0 || q > 1.0) throw ValidationError("toy parameter q must lie in [0, 1]");
    Vector psi = Vector::Zero(4);
    psi(0) = std::sqrt(std::max(0.0, 1.0 - q * q));
    psi(3) = q;
    return PureState(psi);
}

}  // namespace kloshadows
