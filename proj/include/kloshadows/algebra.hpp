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
 * @file algebra.hpp
 * Dense complex operator algebra on qubit registers.
 *
 * Conventions used throughout the library:
 *  - qubit 0 is the leftmost tensor factor, i.e. the most significant bit of
 *    a computational-basis index;
 *  - vectorization is row-major, |O>> = sum_ij O_ij |i,j>, so that
 *    <<A|B>> = Tr[A^dagger B].
 */

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kloshadows/errors.hpp"

namespace kloshadows {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

/** Ascending list of qubit indices. */
using QubitList = std::vector<int>;

/** Relative asymmetry above which a matrix is rejected as non-Hermitian. */
inline constexpr double kHermitianRejectTolerance = 1e-9;

inline bool is_power_of_two(Eigen::Index value) {
    return value > 0 && (value & (value - 1)) == 0;
}

/** Number of qubits of a 2^n dimensional space. Throws if dim is not 2^n. */
inline int qubits_for_dimension(Eigen::Index dim) {
    if (!is_power_of_two(dim)) {
        throw DimensionError("dimension " + std::to_string(dim) +
                             " is not a power of two");
    }
    int n = 0;
    while ((Eigen::Index{1} << n) < dim) ++n;
    return n;
}

inline double max_abs(const Matrix &m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline Matrix kron(const Matrix &a, const Matrix &b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) =
                a(i, j) * b;
        }
    }
    return out;
}

/** Tensor product of a list, left to right. Empty list yields [[1]]. */
inline Matrix kron_all(std::span<const Matrix> factors) {
    Matrix out = Matrix::Identity(1, 1);
    for (const auto &f : factors) out = kron(out, f);
    return out;
}

/** Row-major vectorization |O>>. */
inline Vector vectorize(const Matrix &op) {
    if (op.rows() != op.cols()) {
        throw DimensionError("vectorize: operator is not square");
    }
    const auto dim = op.rows();
    Vector v(dim * dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        for (Eigen::Index j = 0; j < dim; ++j) v(i * dim + j) = op(i, j);
    }
    return v;
}

inline Matrix devectorize(const Vector &v) {
    const auto dim = static_cast<Eigen::Index>(
        std::llround(std::sqrt(static_cast<double>(v.size()))));
    if (dim * dim != v.size()) {
        throw DimensionError("devectorize: length " + std::to_string(v.size()) +
                             " is not a perfect square");
    }
    Matrix op(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        for (Eigen::Index j = 0; j < dim; ++j) op(i, j) = v(i * dim + j);
    }
    return op;
}

/** Hilbert-Schmidt inner product <<A|B>> = Tr[A^dagger B]. */
inline Complex hs_inner(const Matrix &a, const Matrix &b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw DimensionError("hs_inner: shape mismatch");
    }
    return (a.conjugate().cwiseProduct(b)).sum();
}

/** Re Tr[A B] for Hermitian A, B without forming the product. */
inline double trace_product_real(const Matrix &a, const Matrix &b) {
    return (a.transpose().cwiseProduct(b)).sum().real();
}

/**
 * Returns (A + A^dagger)/2, rejecting inputs whose asymmetry exceeds
 * kHermitianRejectTolerance relative to max(1, ||A||_max).
 */
inline Matrix hermitize(const Matrix &a) {
    if (a.rows() != a.cols()) {
        throw DimensionError("hermitize: operator is not square");
    }
    const double asym = max_abs(a - a.adjoint());
    const double scale = std::max(1.0, max_abs(a));
    if (asym > kHermitianRejectTolerance * scale) {
        throw ValidationError("operator is not Hermitian (asymmetry " +
                              std::to_string(asym) + ")");
    }
    return (a + a.adjoint()) * 0.5;
}

/** Validates that qubits are strictly ascending and within [0, n). */
inline void check_qubit_subset(std::span<const int> qubits, int n) {
    for (std::size_t i = 0; i < qubits.size(); ++i) {
        if (qubits[i] < 0 || qubits[i] >= n) {
            throw IndexError("qubit index " + std::to_string(qubits[i]) +
                             " out of range for " + std::to_string(n) +
                             " qubits");
        }
        if (i > 0 && qubits[i] <= qubits[i - 1]) {
            throw IndexError("qubit list must be strictly ascending");
        }
    }
}

namespace detail {

/** Basis-index offsets obtained by scattering the bits of 0..2^|qubits|-1
 *  onto the listed qubit positions of an n-qubit register. */
inline std::vector<std::size_t> scatter_offsets(std::span<const int> qubits,
                                                int n) {
    const std::size_t count = std::size_t{1} << qubits.size();
    std::vector<std::size_t> out(count, 0);
    const int k = static_cast<int>(qubits.size());
    for (std::size_t a = 0; a < count; ++a) {
        std::size_t idx = 0;
        for (int j = 0; j < k; ++j) {
            if ((a >> (k - 1 - j)) & 1U) {
                idx |= std::size_t{1} << (n - 1 - qubits[j]);
            }
        }
        out[a] = idx;
    }
    return out;
}

inline QubitList complement(std::span<const int> qubits, int n) {
    QubitList rest;
    for (int q = 0; q < n; ++q) {
        if (std::find(qubits.begin(), qubits.end(), q) == qubits.end()) {
            rest.push_back(q);
        }
    }
    return rest;
}

}  // namespace detail

/** Partial trace keeping the listed (ascending) qubits. */
inline Matrix partial_trace(const Matrix &op, std::span<const int> keep) {
    if (op.rows() != op.cols()) {
        throw DimensionError("partial_trace: operator is not square");
    }
    const int n = qubits_for_dimension(op.rows());
    check_qubit_subset(keep, n);
    const QubitList traced = detail::complement(keep, n);
    const auto kept_off = detail::scatter_offsets(keep, n);
    const auto traced_off = detail::scatter_offsets(traced, n);
    const auto dk = static_cast<Eigen::Index>(kept_off.size());
    Matrix out = Matrix::Zero(dk, dk);
    for (Eigen::Index a = 0; a < dk; ++a) {
        for (Eigen::Index b = 0; b < dk; ++b) {
            Complex acc = 0.0;
            for (auto t : traced_off) {
                acc += op(static_cast<Eigen::Index>(kept_off[a] | t),
                          static_cast<Eigen::Index>(kept_off[b] | t));
            }
            out(a, b) = acc;
        }
    }
    return out;
}

/**
 * Reorders tensor factors: qubit j of the result is qubit order[j] of the
 * input. `order` must be a permutation of 0..n-1.
 */
inline Matrix permute_qubits(const Matrix &op, std::span<const int> order) {
    const int n = qubits_for_dimension(op.rows());
    if (static_cast<int>(order.size()) != n) {
        throw DimensionError("permute_qubits: order has wrong length");
    }
    std::vector<int> sorted(order.begin(), order.end());
    std::sort(sorted.begin(), sorted.end());
    for (int i = 0; i < n; ++i) {
        if (sorted[i] != i) throw IndexError("permute_qubits: not a permutation");
    }
    const auto dim = op.rows();
    std::vector<Eigen::Index> source(static_cast<std::size_t>(dim));
    for (Eigen::Index idx = 0; idx < dim; ++idx) {
        Eigen::Index old = 0;
        for (int j = 0; j < n; ++j) {
            if ((idx >> (n - 1 - j)) & 1) old |= Eigen::Index{1} << (n - 1 - order[j]);
        }
        source[static_cast<std::size_t>(idx)] = old;
    }
    Matrix out(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        for (Eigen::Index j = 0; j < dim; ++j) {
            out(i, j) = op(source[i], source[j]);
        }
    }
    return out;
}

/**
 * Applies a 2^k x 2^k operator acting on the listed ascending qubits to every
 * column of `target` (an n-qubit vector or matrix), in place.
 */
template <class Derived>
void apply_on_qubits(const Matrix &op, std::span<const int> qubits,
                     Eigen::MatrixBase<Derived> &target) {
    const int n = qubits_for_dimension(target.rows());
    check_qubit_subset(qubits, n);
    const auto local = detail::scatter_offsets(qubits, n);
    const auto rest = detail::scatter_offsets(detail::complement(qubits, n), n);
    const auto dk = static_cast<Eigen::Index>(local.size());
    if (op.rows() != dk || op.cols() != dk) {
        throw DimensionError("apply_on_qubits: operator size mismatch");
    }
    Vector buffer(dk), result(dk);
    for (Eigen::Index col = 0; col < target.cols(); ++col) {
        for (auto r : rest) {
            for (Eigen::Index a = 0; a < dk; ++a) {
                buffer(a) = target(static_cast<Eigen::Index>(r | local[a]), col);
            }
            result.noalias() = op * buffer;
            for (Eigen::Index a = 0; a < dk; ++a) {
                target(static_cast<Eigen::Index>(r | local[a]), col) = result(a);
            }
        }
    }
}

/** Eigenvalues in ascending order with matching orthonormal eigenvectors. */
struct Eigensystem {
    RealVector values;
    Matrix vectors;
};

inline Eigensystem hermitian_eig(const Matrix &h) {
    const Matrix sym = hermitize(h);
    Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("hermitian_eig: eigensolver failed");
    }
    return {solver.eigenvalues(), solver.eigenvectors()};
}

/** Euclidean projection onto the probability simplex {x >= 0, sum x = 1}. */
inline RealVector project_to_simplex(const RealVector &values) {
    std::vector<double> u(values.data(), values.data() + values.size());
    std::sort(u.begin(), u.end(), std::greater<>());
    double cumulative = 0.0;
    double threshold = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) {
        cumulative += u[j];
        const double candidate = (cumulative - 1.0) / static_cast<double>(j + 1);
        if (u[j] - candidate > 0) threshold = candidate;
    }
    return (values.array() - threshold).cwiseMax(0.0).matrix();
}

/**
 * Closest density matrix (PSD, unit trace) to a Hermitian operator in
 * Frobenius norm: the eigenvalues are projected onto the simplex.
 */
inline Matrix project_to_density(const Matrix &h) {
    const auto eig = hermitian_eig(h);
    const RealVector lambda = project_to_simplex(eig.values);
    Matrix out = eig.vectors * lambda.cast<Complex>().asDiagonal() *
                 eig.vectors.adjoint();
    return (out + out.adjoint()) * 0.5;
}

}  // namespace kloshadows
