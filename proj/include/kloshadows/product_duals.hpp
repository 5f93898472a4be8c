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
 * @file product_duals.hpp
 * Minimum-MSE product duals over a partition by alternating minimization.
 *
 * A site's duals are kept in real coordinates x_m(a) = Tr[D_m P_a] / sqrt(dim)
 * over the normalized Pauli basis, where Tr[D_m^2] = |x_m|^2 and duality reads
 * X Pi^T = I. Valid duals are X = X_can + Z K^T with K an orthonormal basis
 * of ker(Pi), so each site update is a weighted least-squares problem in Z.
 */

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include <Eigen/SVD>

#include "kloshadows/duals.hpp"
#include "kloshadows/pauli.hpp"
#include "kloshadows/povm.hpp"
#include "kloshadows/states.hpp"
#include "kloshadows/tomography.hpp"

namespace kloshadows {

struct ProductDualOptions {
    int max_total_qubits = 4;
    int max_site_qubits = 2;
    int max_sweeps = 500;
    double tolerance = 1e-10;
};

struct ProductDualResult {
    GlobalDuals duals;
    /** Objective sum_m p_m prod_G Tr[(D^G_{m_G})^2] before the first and after every sweep. */
    std::vector<double> history;
    int sweeps = 0;
};

/** Born probabilities of every joint outcome, row-major with qubit 0 most significant. */
inline std::vector<double> joint_probabilities(const State &state, const ProductPovm &povm, int max_qubits = 6) {
    const int n = state_qubits(state);
    if (n > max_qubits) throw CapacityError("joint_probabilities: too many qubits to enumerate");
    QubitList all(static_cast<std::size_t>(n));
    std::iota(all.begin(), all.end(), 0);
    const DensityMatrix rho = to_density(state);
    return predicted_probabilities(rho.matrix(), group_effects(povm, all));
}

/** sum_m p_m prod_G Tr[(D^G_{m_G})^2] - Tr[rho^2] for a product dual. */
inline double product_state_mse(const GlobalDuals &duals, std::span<const double> joint, const Matrix &rho,
                                const ProductPovm &povm) {
    const int n = duals.qubits();
    QubitList all(static_cast<std::size_t>(n));
    std::iota(all.begin(), all.end(), 0);
    if (joint.size() != group_outcome_count(povm, all)) throw DimensionError("product_state_mse: probability count");
    std::vector<std::vector<double>> norms;
    for (const auto &f : duals.frames()) {
        std::vector<double> v(f.size());
        for (std::size_t m = 0; m < f.size(); ++m) v[m] = f.dual(m).squaredNorm();
        norms.push_back(std::move(v));
    }
    double acc = 0.0;
    for (std::size_t j = 0; j < joint.size(); ++j) {
        if (joint[j] == 0.0) continue;
        const auto idx = unflatten_outcome(povm, all, j);
        double prod = joint[j];
        for (std::size_t g = 0; g < duals.frames().size(); ++g) {
            std::size_t flat = 0;
            for (int q : duals.partition().groups()[g]) {
                flat = flat * static_cast<std::size_t>(povm.outcomes(q)) + static_cast<std::size_t>(idx[static_cast<std::size_t>(q)]);
            }
            prod *= norms[g][flat];
        }
        acc += prod;
    }
    return acc - rho.squaredNorm();
}

namespace detail {

inline std::vector<std::string> pauli_basis_words(std::size_t qubits) {
    std::vector<std::string> words{""};
    for (std::size_t j = 0; j < qubits; ++j) {
        std::vector<std::string> next;
        for (const auto &w : words) {
            for (char c : {'I', 'X', 'Y', 'Z'}) next.push_back(w + c);
        }
        words = std::move(next);
    }
    return words;
}

struct Site {
    QubitList group;
    std::vector<std::string> basis;
    RealMatrix x_can;   // dim^2 x M
    RealMatrix kernel;  // M x (M - dim^2)
    RealMatrix x;       // current coordinates
    double scale = 1.0;

    RealMatrix coordinates(const std::vector<Matrix> &ops) const {
        RealMatrix out(static_cast<Eigen::Index>(basis.size()), static_cast<Eigen::Index>(ops.size()));
        for (std::size_t m = 0; m < ops.size(); ++m) {
            for (std::size_t a = 0; a < basis.size(); ++a) {
                out(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(m)) = trace_with_pauli(ops[m], basis[a]) / scale;
            }
        }
        return out;
    }

    std::vector<Matrix> operators() const {
        const auto dim = Eigen::Index{1} << group.size();
        std::vector<Matrix> out(static_cast<std::size_t>(x.cols()), Matrix::Zero(dim, dim));
        std::vector<Matrix> paulis;
        for (const auto &w : basis) paulis.push_back(pauli_word_matrix(w));
        for (Eigen::Index m = 0; m < x.cols(); ++m) {
            for (std::size_t a = 0; a < basis.size(); ++a) {
                out[static_cast<std::size_t>(m)] += (x(static_cast<Eigen::Index>(a), m) / scale) * paulis[a];
            }
        }
        return out;
    }

    RealVector squared_norms() const { return x.colwise().squaredNorm().transpose(); }
};

}  // namespace detail

/**
 * Alternating minimization of sum_m p_m prod_G Tr[(D^G_{m_G})^2] over products
 * of site-wise valid duals, started from the per-site optimal duals of the
 * marginal distributions. `joint` holds the probabilities of all joint
 * outcomes in the order of joint_probabilities.
 */
inline ProductDualResult optimize_product_duals(std::span<const double> joint, const Partition &partition,
                                                const ProductPovm &povm, const ProductDualOptions &options = {}) {
    const int n = partition.qubits();
    if (n > options.max_total_qubits) throw CapacityError("optimize_product_duals: too many qubits");
    if (partition.max_group_size() > options.max_site_qubits) {
        throw CapacityError("optimize_product_duals: site larger than the cap");
    }
    if (povm.qubits() != n) throw DimensionError("optimize_product_duals: POVM size mismatch");
    QubitList all(static_cast<std::size_t>(n));
    std::iota(all.begin(), all.end(), 0);
    if (joint.size() != group_outcome_count(povm, all)) throw DimensionError("optimize_product_duals: probability count");

    const auto &groups = partition.groups();
    const std::size_t ns = groups.size();
    // Flat site outcome of every joint outcome.
    std::vector<std::vector<std::size_t>> site_index(joint.size(), std::vector<std::size_t>(ns));
    for (std::size_t j = 0; j < joint.size(); ++j) {
        const auto idx = unflatten_outcome(povm, all, j);
        for (std::size_t s = 0; s < ns; ++s) {
            std::size_t flat = 0;
            for (int q : groups[s]) {
                flat = flat * static_cast<std::size_t>(povm.outcomes(q)) + static_cast<std::size_t>(idx[static_cast<std::size_t>(q)]);
            }
            site_index[j][s] = flat;
        }
    }

    std::vector<detail::Site> sites(ns);
    for (std::size_t s = 0; s < ns; ++s) {
        auto &site = sites[s];
        site.group = groups[s];
        site.basis = detail::pauli_basis_words(site.group.size());
        site.scale = std::sqrt(static_cast<double>(Eigen::Index{1} << site.group.size()));
        const auto effects = group_effects(povm, site.group);
        const RealMatrix pi = site.coordinates(effects);
        Eigen::JacobiSVD<RealMatrix> svd(pi, Eigen::ComputeFullV);
        const auto rank = static_cast<Eigen::Index>(site.basis.size());
        site.kernel = svd.matrixV().rightCols(pi.cols() - rank);
        site.x_can = site.coordinates(canonical_duals(povm, site.group).duals());

        std::vector<double> marginal(effects.size(), 0.0);
        for (std::size_t j = 0; j < joint.size(); ++j) marginal[site_index[j][s]] += joint[j];
        site.x = site.coordinates(optimal_duals(povm, site.group, marginal).duals());
    }

    const auto objective = [&]() {
        std::vector<RealVector> norms;
        for (const auto &site : sites) norms.push_back(site.squared_norms());
        double acc = 0.0;
        for (std::size_t j = 0; j < joint.size(); ++j) {
            double prod = joint[j];
            for (std::size_t s = 0; s < ns; ++s) prod *= norms[s](static_cast<Eigen::Index>(site_index[j][s]));
            acc += prod;
        }
        return acc;
    };

    std::vector<double> history{objective()};
    int sweeps = 0;
    for (int sweep = 0; sweep < options.max_sweeps; ++sweep) {
        for (std::size_t s = 0; s < ns; ++s) {
            auto &site = sites[s];
            std::vector<RealVector> norms;
            for (const auto &other : sites) norms.push_back(other.squared_norms());
            RealVector q = RealVector::Zero(site.x.cols());
            for (std::size_t j = 0; j < joint.size(); ++j) {
                double prod = joint[j];
                for (std::size_t o = 0; o < ns; ++o) {
                    if (o != s) prod *= norms[o](static_cast<Eigen::Index>(site_index[j][o]));
                }
                q(static_cast<Eigen::Index>(site_index[j][s])) += prod;
            }
            const RealMatrix qk = q.asDiagonal() * site.kernel;
            const RealMatrix gram = site.kernel.transpose() * qk;
            const RealMatrix z = -(site.x_can * qk) * gram.completeOrthogonalDecomposition().pseudoInverse();
            site.x = site.x_can + z * site.kernel.transpose();
        }
        const double value = objective();
        const double previous = history.back();
        history.push_back(value);
        sweeps = sweep + 1;
        if (previous - value < options.tolerance) break;
    }

    std::vector<DualFrame> frames;
    for (const auto &site : sites) {
        DualFrame frame(site.group, site.operators(), "optimized-product");
        validate_duals(frame, povm);
        frames.push_back(std::move(frame));
    }
    return {GlobalDuals(partition, std::move(frames)), std::move(history), sweeps};
}

}  // namespace kloshadows
