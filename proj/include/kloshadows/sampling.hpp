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
 * @file sampling.hpp
 * Seeded Born-rule simulation of product-POVM shots and outcome tables.
 *
 * Shot s draws its uniforms from the counter-based substream (seed, s), so a
 * Dataset is a pure function of (state, povm, shots, seed) regardless of how
 * many worker threads produce it.
 */

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "kloshadows/algebra.hpp"
#include "kloshadows/parallel.hpp"
#include "kloshadows/povm.hpp"
#include "kloshadows/rng.hpp"
#include "kloshadows/states.hpp"

namespace kloshadows {

/** S shot records of n per-qubit outcome indices, stored shot-major. */
class Dataset {
   public:
    Dataset(int qubits, int outcomes_per_qubit, std::uint64_t seed, std::string povm_id,
            std::vector<std::uint8_t> records)
        : qubits_(qubits),
          outcomes_(outcomes_per_qubit),
          seed_(seed),
          povm_id_(std::move(povm_id)),
          records_(std::move(records)) {
        if (qubits < 1) throw ValidationError("dataset needs at least one qubit");
        if (outcomes_per_qubit < 1 || outcomes_per_qubit > 255) {
            throw ValidationError("outcomes per qubit must lie in [1, 255]");
        }
        if (records_.size() % static_cast<std::size_t>(qubits) != 0) {
            throw DimensionError("record buffer is not a whole number of shots");
        }
        for (auto v : records_) {
            if (v >= outcomes_per_qubit) throw IndexError("outcome index out of range in dataset");
        }
    }

    int qubits() const { return qubits_; }
    int outcomes_per_qubit() const { return outcomes_; }
    std::uint64_t shots() const { return records_.size() / static_cast<std::size_t>(qubits_); }
    std::uint64_t seed() const { return seed_; }
    const std::string &povm_id() const { return povm_id_; }

    std::span<const std::uint8_t> shot(std::uint64_t s) const {
        return std::span<const std::uint8_t>(records_).subspan(
            static_cast<std::size_t>(s) * static_cast<std::size_t>(qubits_),
            static_cast<std::size_t>(qubits_));
    }
    const std::vector<std::uint8_t> &records() const { return records_; }

    friend bool operator==(const Dataset &, const Dataset &) = default;

   private:
    int qubits_;
    int outcomes_;
    std::uint64_t seed_;
    std::string povm_id_;
    std::vector<std::uint8_t> records_;
};

/** Outcome counts of a qubit group, flattened row-major in group order. */
struct MarginalTable {
    QubitList group;
    int outcomes_per_qubit = 0;
    std::vector<std::uint64_t> counts;
    std::uint64_t shots = 0;

    std::vector<double> frequencies() const {
        std::vector<double> f(counts.size(), 0.0);
        if (shots == 0) return f;
        for (std::size_t j = 0; j < counts.size(); ++j) {
            f[j] = static_cast<double>(counts[j]) / static_cast<double>(shots);
        }
        return f;
    }
};

inline constexpr int kDefaultMaxMarginalGroup = 8;

inline std::size_t flat_group_index(std::span<const std::uint8_t> shot, std::span<const int> group,
                                    int d) {
    std::size_t idx = 0;
    for (int q : group) idx = idx * static_cast<std::size_t>(d) + shot[static_cast<std::size_t>(q)];
    return idx;
}

inline MarginalTable marginal_counts(const Dataset &ds, std::span<const int> group,
                                     int max_group = kDefaultMaxMarginalGroup) {
    check_qubit_subset(group, ds.qubits());
    if (group.empty()) throw DimensionError("marginal_counts: empty group");
    if (static_cast<int>(group.size()) > max_group) {
        throw CapacityError("marginal table over " + std::to_string(group.size()) +
                            " qubits exceeds the cap of " + std::to_string(max_group));
    }
    const int d = ds.outcomes_per_qubit();
    std::size_t size = 1;
    for (std::size_t j = 0; j < group.size(); ++j) size *= static_cast<std::size_t>(d);
    MarginalTable table{QubitList(group.begin(), group.end()), d,
                        std::vector<std::uint64_t>(size, 0), ds.shots()};
    for (std::uint64_t s = 0; s < ds.shots(); ++s) ++table.counts[flat_group_index(ds.shot(s), group, d)];
    return table;
}

/** Sums a table over the qubits not listed in `keep` (a subset of its group). */
inline MarginalTable marginalize(const MarginalTable &table, std::span<const int> keep) {
    std::vector<std::size_t> positions;
    for (int q : keep) {
        auto it = std::find(table.group.begin(), table.group.end(), q);
        if (it == table.group.end()) throw IndexError("marginalize: qubit not in table");
        positions.push_back(static_cast<std::size_t>(it - table.group.begin()));
    }
    const auto d = static_cast<std::size_t>(table.outcomes_per_qubit);
    std::size_t size = 1;
    for (std::size_t j = 0; j < keep.size(); ++j) size *= d;
    MarginalTable out{QubitList(keep.begin(), keep.end()), table.outcomes_per_qubit,
                      std::vector<std::uint64_t>(size, 0), table.shots};
    const std::size_t k = table.group.size();
    std::vector<std::size_t> digits(k);
    for (std::size_t flat = 0; flat < table.counts.size(); ++flat) {
        std::size_t rem = flat;
        for (std::size_t j = k; j-- > 0;) {
            digits[j] = rem % d;
            rem /= d;
        }
        std::size_t idx = 0;
        for (auto p : positions) idx = idx * d + digits[p];
        out.counts[idx] += table.counts[flat];
    }
    return out;
}

namespace detail {

/** Picks index m with probability weights[m]/sum(weights) from u in [0,1). */
inline std::size_t pick_outcome(std::span<const double> weights, double u) {
    double total = 0.0;
    for (double w : weights) total += w;
    const double target = u * total;
    double cumulative = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t m = 0; m < weights.size(); ++m) {
        if (weights[m] <= 0.0) continue;
        cumulative += weights[m];
        last_positive = m;
        if (target < cumulative) return m;
    }
    return last_positive;
}

/** Single-qubit effects and Kraus operators unpacked for the inner loops. */
struct LocalTables {
    std::vector<std::array<Complex, 4>> effects;
    std::vector<std::array<Complex, 4>> kraus;

    explicit LocalTables(const LocalPovm &local) {
        for (std::size_t m = 0; m < local.size(); ++m) {
            const auto &e = local.effect(m);
            const auto &k = local.kraus(m);
            effects.push_back({e(0, 0), e(0, 1), e(1, 0), e(1, 1)});
            kraus.push_back({k(0, 0), k(0, 1), k(1, 0), k(1, 1)});
        }
    }

    /** max(0, Re Tr[E_m r]) for a 2x2 reduced state r = (r00, r01, r10, r11). */
    void probabilities(const std::array<Complex, 4> &r, std::vector<double> &out) const {
        out.resize(effects.size());
        for (std::size_t m = 0; m < effects.size(); ++m) {
            const auto &e = effects[m];
            out[m] = std::max(0.0, (e[0] * r[0] + e[1] * r[2] + e[2] * r[1] + e[3] * r[3]).real());
        }
    }
};

inline std::vector<LocalTables> local_tables(const ProductPovm &povm) {
    std::vector<LocalTables> out;
    for (int q = 0; q < povm.qubits(); ++q) out.emplace_back(povm.site(q));
    return out;
}

/** Sequential collapse sampler for a statevector. */
class PureSampler {
   public:
    explicit PureSampler(const Vector &psi) : psi_(psi), qubits_(qubits_for_dimension(psi.size())) {}

    void sample(CounterRng &rng, std::span<std::uint8_t> out, std::span<const int> qubit_map,
                const std::vector<LocalTables> &tables, Vector &psi, std::vector<double> &weights) const {
        psi = psi_;
        const auto dim = static_cast<std::size_t>(psi.size());
        for (int q = 0; q < qubits_; ++q) {
            const std::size_t bit = std::size_t{1} << (qubits_ - 1 - q);
            std::array<Complex, 4> r{};
            for (std::size_t j = 0; j < dim; ++j) {
                if (j & bit) continue;
                const Complex a0 = psi(static_cast<Eigen::Index>(j));
                const Complex a1 = psi(static_cast<Eigen::Index>(j | bit));
                r[0] += std::norm(a0);
                r[1] += a0 * std::conj(a1);
                r[3] += std::norm(a1);
            }
            r[2] = std::conj(r[1]);
            const int site = qubit_map[static_cast<std::size_t>(q)];
            const auto &table = tables[static_cast<std::size_t>(site)];
            table.probabilities(r, weights);
            const std::size_t m = pick_outcome(weights, rng.uniform());
            const auto &k = table.kraus[m];
            double norm = 0.0;
            for (std::size_t j = 0; j < dim; ++j) {
                if (j & bit) continue;
                const auto i0 = static_cast<Eigen::Index>(j);
                const auto i1 = static_cast<Eigen::Index>(j | bit);
                const Complex a0 = psi(i0);
                const Complex a1 = psi(i1);
                psi(i0) = k[0] * a0 + k[1] * a1;
                psi(i1) = k[2] * a0 + k[3] * a1;
                norm += std::norm(psi(i0)) + std::norm(psi(i1));
            }
            if (!(norm > 1e-300)) throw NumericalError("zero-norm collapse while sampling");
            psi /= std::sqrt(norm);
            out[static_cast<std::size_t>(site)] = static_cast<std::uint8_t>(m);
        }
    }

   private:
    Vector psi_;
    int qubits_;
};

/** Sequential Lueders-collapse sampler for a density matrix. */
class DensitySampler {
   public:
    explicit DensitySampler(const Matrix &rho) : rho_(rho), qubits_(qubits_for_dimension(rho.rows())) {}

    void sample(CounterRng &rng, std::span<std::uint8_t> out, std::span<const int> qubit_map,
                const std::vector<LocalTables> &tables, Matrix &rho, std::vector<double> &weights) const {
        rho = rho_;
        const auto dim = static_cast<std::size_t>(rho.rows());
        for (int q = 0; q < qubits_; ++q) {
            const std::size_t bit = std::size_t{1} << (qubits_ - 1 - q);
            std::array<Complex, 4> r{};
            for (std::size_t t = 0; t < dim; ++t) {
                if (t & bit) continue;
                const auto i0 = static_cast<Eigen::Index>(t);
                const auto i1 = static_cast<Eigen::Index>(t | bit);
                r[0] += rho(i0, i0);
                r[1] += rho(i0, i1);
                r[2] += rho(i1, i0);
                r[3] += rho(i1, i1);
            }
            const int site = qubit_map[static_cast<std::size_t>(q)];
            const auto &table = tables[static_cast<std::size_t>(site)];
            table.probabilities(r, weights);
            const std::size_t m = pick_outcome(weights, rng.uniform());
            const auto &k = table.kraus[m];
            // rho <- K rho K^dagger, rows then columns.
            for (std::size_t t = 0; t < dim; ++t) {
                if (t & bit) continue;
                auto r0 = rho.row(static_cast<Eigen::Index>(t));
                auto r1 = rho.row(static_cast<Eigen::Index>(t | bit));
                for (Eigen::Index c = 0; c < rho.cols(); ++c) {
                    const Complex a0 = r0(c), a1 = r1(c);
                    r0(c) = k[0] * a0 + k[1] * a1;
                    r1(c) = k[2] * a0 + k[3] * a1;
                }
            }
            for (std::size_t t = 0; t < dim; ++t) {
                if (t & bit) continue;
                auto c0 = rho.col(static_cast<Eigen::Index>(t));
                auto c1 = rho.col(static_cast<Eigen::Index>(t | bit));
                for (Eigen::Index row = 0; row < rho.rows(); ++row) {
                    const Complex a0 = c0(row), a1 = c1(row);
                    c0(row) = std::conj(k[0]) * a0 + std::conj(k[1]) * a1;
                    c1(row) = std::conj(k[2]) * a0 + std::conj(k[3]) * a1;
                }
            }
            const double tr = rho.trace().real();
            if (!(tr > 1e-300)) throw NumericalError("zero-norm collapse while sampling");
            rho /= tr;
            out[static_cast<std::size_t>(site)] = static_cast<std::uint8_t>(m);
        }
    }

   private:
    Matrix rho_;
    int qubits_;
};

}  // namespace detail

struct SamplingOptions {
    unsigned workers = 0;  ///< 0 = all hardware threads
    DenseLimits limits{};
};

/**
 * Draws `shots` outcome records. Qubits are measured in ascending order; each
 * outcome comes from the conditional distribution after the previous
 * collapses. Blocks of a BlockProductState are sampled independently.
 */
inline Dataset sample_shots(const State &state, const ProductPovm &povm, std::uint64_t shots,
                            std::uint64_t seed, const SamplingOptions &options = {}) {
    const int n = state_qubits(state);
    if (povm.qubits() != n) throw DimensionError("sample_shots: POVM and state qubit counts differ");
    const int d = povm.uniform_outcomes();

    for (int q = 0; q < n; ++q) {
        if (povm.site(q).effect(0).rows() != 2) throw DimensionError("sample_shots: local POVMs must act on qubits");
    }
    const auto tables = detail::local_tables(povm);

    // One sampler per independent block, each with its qubit map.
    struct Block {
        std::variant<detail::PureSampler, detail::DensitySampler> sampler;
        QubitList qubits;
    };
    std::vector<Block> blocks;
    QubitList all(static_cast<std::size_t>(n));
    std::iota(all.begin(), all.end(), 0);
    if (const auto *pure = std::get_if<PureState>(&state)) {
        if (n > options.limits.statevector_qubits) throw CapacityError("state exceeds the statevector cap");
        blocks.push_back({detail::PureSampler(pure->amplitudes()), all});
    } else if (const auto *rho = std::get_if<DensityMatrix>(&state)) {
        if (n > options.limits.density_qubits) throw CapacityError("state exceeds the density cap");
        blocks.push_back({detail::DensitySampler(rho->matrix()), all});
    } else {
        const auto &bp = std::get<BlockProductState>(state);
        for (std::size_t g = 0; g < bp.blocks().size(); ++g) {
            blocks.push_back({detail::DensitySampler(bp.blocks()[g].matrix()), bp.partition().groups()[g]});
        }
    }

    std::vector<std::uint8_t> records(static_cast<std::size_t>(shots) * static_cast<std::size_t>(n));
    parallel_for(static_cast<std::size_t>(shots), options.workers, [&](std::size_t begin, std::size_t end) {
        Vector psi;
        Matrix rho;
        std::vector<double> weights;
        for (std::size_t s = begin; s < end; ++s) {
            CounterRng rng(seed, s);
            auto out = std::span<std::uint8_t>(records).subspan(s * static_cast<std::size_t>(n),
                                                                static_cast<std::size_t>(n));
            for (const auto &b : blocks) {
                if (const auto *ps = std::get_if<detail::PureSampler>(&b.sampler)) {
                    ps->sample(rng, out, b.qubits, tables, psi, weights);
                } else {
                    std::get<detail::DensitySampler>(b.sampler).sample(rng, out, b.qubits, tables, rho, weights);
                }
            }
        }
    });
    return Dataset(n, d, seed, povm.id(), std::move(records));
}

}  // namespace kloshadows
