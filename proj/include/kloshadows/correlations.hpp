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
 * @file correlations.hpp
 * Plug-in mutual information from outcome frequencies, the pairwise MI graph,
 * qubit partitioners and weighted modularity. Logarithms are natural.
 */

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "kloshadows/algebra.hpp"
#include "kloshadows/parallel.hpp"
#include "kloshadows/partition.hpp"
#include "kloshadows/sampling.hpp"

namespace kloshadows {

/** Largest joint alphabet accepted by group_mutual_information. */
inline constexpr std::size_t kMaxJointAlphabet = 1679616;  // 6^8

/**
 * Mutual information of a joint count table laid out row-major as
 * counts[a * cols + b]. Zero cells are skipped; the result is clamped at 0.
 */
inline double mutual_information(std::span<const std::uint64_t> counts, std::size_t rows,
                                 std::size_t cols) {
    if (counts.size() != rows * cols) throw DimensionError("mutual_information: table shape mismatch");
    std::uint64_t total = 0;
    std::vector<std::uint64_t> row_sum(rows, 0), col_sum(cols, 0);
    for (std::size_t a = 0; a < rows; ++a) {
        for (std::size_t b = 0; b < cols; ++b) {
            const auto c = counts[a * cols + b];
            row_sum[a] += c;
            col_sum[b] += c;
            total += c;
        }
    }
    if (total == 0) throw ValidationError("mutual_information: empty table");
    const double s = static_cast<double>(total);
    double mi = 0.0;
    for (std::size_t a = 0; a < rows; ++a) {
        if (row_sum[a] == 0) continue;
        for (std::size_t b = 0; b < cols; ++b) {
            const auto c = counts[a * cols + b];
            if (c == 0) continue;
            const double cd = static_cast<double>(c);
            mi += cd / s * std::log(cd * s / (static_cast<double>(row_sum[a]) * static_cast<double>(col_sum[b])));
        }
    }
    return std::max(0.0, mi);
}

/** MI between the joint outcome of `group` and the outcome of qubit q. */
inline double group_mutual_information(const Dataset &ds, std::span<const int> group, int q) {
    if (ds.shots() == 0) throw ValidationError("mutual information of an empty dataset");
    if (group.empty()) throw DimensionError("group_mutual_information: empty group");
    if (q < 0 || q >= ds.qubits()) throw IndexError("qubit index out of range");
    if (std::find(group.begin(), group.end(), q) != group.end()) {
        throw IndexError("group_mutual_information: qubit belongs to the group");
    }
    for (int g : group) {
        if (g < 0 || g >= ds.qubits()) throw IndexError("qubit index out of range");
    }
    const auto d = static_cast<std::size_t>(ds.outcomes_per_qubit());
    std::size_t rows = 1;
    for (std::size_t j = 0; j < group.size(); ++j) {
        rows *= d;
        if (rows * d > kMaxJointAlphabet) throw CapacityError("joint alphabet too large for mutual information");
    }
    std::vector<std::uint64_t> counts(rows * d, 0);
    for (std::uint64_t s = 0; s < ds.shots(); ++s) {
        const auto shot = ds.shot(s);
        ++counts[flat_group_index(shot, group, static_cast<int>(d)) * d + shot[static_cast<std::size_t>(q)]];
    }
    return mutual_information(counts, rows, d);
}

/** Symmetric by construction: the table is always built as (min, max). */
inline double pair_mutual_information(const Dataset &ds, int i, int j) {
    if (i == j) throw IndexError("pair_mutual_information: qubits must differ");
    const int lo = std::min(i, j);
    const int hi = std::max(i, j);
    const int group[1] = {lo};
    return group_mutual_information(ds, group, hi);
}

/** Symmetric non-negative weight matrix with zero diagonal. */
class MIGraph {
   public:
    explicit MIGraph(RealMatrix weights) : weights_(std::move(weights)) {
        if (weights_.rows() != weights_.cols()) throw DimensionError("MIGraph: weights not square");
        for (Eigen::Index i = 0; i < weights_.rows(); ++i) {
            weights_(i, i) = 0.0;
            for (Eigen::Index j = 0; j < i; ++j) {
                if (!std::isfinite(weights_(i, j)) || !std::isfinite(weights_(j, i))) {
                    throw ValidationError("MIGraph: non-finite weight");
                }
                if (weights_(i, j) != weights_(j, i)) throw ValidationError("MIGraph: weights not symmetric");
                const double w = std::max(0.0, weights_(i, j));
                weights_(i, j) = weights_(j, i) = w;
            }
        }
    }

    int qubits() const { return static_cast<int>(weights_.rows()); }
    double weight(int i, int j) const { return weights_(i, j); }
    const RealMatrix &weights() const { return weights_; }

   private:
    RealMatrix weights_;
};

inline MIGraph mi_graph(const Dataset &ds, unsigned workers = 0) {
    const int n = ds.qubits();
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
    }
    std::vector<double> values(pairs.size(), 0.0);
    parallel_for(pairs.size(), workers, [&](std::size_t begin, std::size_t end) {
        for (std::size_t p = begin; p < end; ++p) {
            values[p] = pair_mutual_information(ds, pairs[p].first, pairs[p].second);
        }
    });
    RealMatrix w = RealMatrix::Zero(n, n);
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        w(pairs[p].first, pairs[p].second) = values[p];
        w(pairs[p].second, pairs[p].first) = values[p];
    }
    return MIGraph(std::move(w));
}

namespace detail {

inline void check_k(int k) {
    if (k < 1) throw ValidationError("maximum group size k must be at least 1");
}

}  // namespace detail

/** Consecutive index blocks of size k; the remainder forms the last group. */
inline Partition naive_partition(int n, int k) {
    detail::check_k(k);
    std::vector<QubitList> groups;
    for (int start = 0; start < n; start += k) {
        QubitList g;
        for (int q = start; q < std::min(n, start + k); ++q) g.push_back(q);
        groups.push_back(std::move(g));
    }
    return Partition(n, std::move(groups), k);
}

/**
 * Greedy grouping: seed each group with the unassigned pair of largest MI,
 * then grow it with the unassigned qubit of largest group MI until it holds k
 * qubits. Ties go to the lowest qubit index.
 */
inline Partition greedy_partition(const Dataset &ds, int k, unsigned workers = 0) {
    detail::check_k(k);
    const int n = ds.qubits();
    if (k == 1) return Partition::singletons(n);
    const MIGraph graph = mi_graph(ds, workers);
    std::vector<bool> assigned(static_cast<std::size_t>(n), false);
    int remaining = n;
    std::vector<QubitList> groups;
    while (remaining > 0) {
        if (remaining == 1) {
            for (int q = 0; q < n; ++q) {
                if (!assigned[static_cast<std::size_t>(q)]) groups.push_back({q});
            }
            break;
        }
        int bi = -1, bj = -1;
        double best = -1.0;
        for (int i = 0; i < n; ++i) {
            if (assigned[static_cast<std::size_t>(i)]) continue;
            for (int j = i + 1; j < n; ++j) {
                if (assigned[static_cast<std::size_t>(j)]) continue;
                if (graph.weight(i, j) > best) {
                    best = graph.weight(i, j);
                    bi = i;
                    bj = j;
                }
            }
        }
        QubitList group{bi, bj};
        assigned[static_cast<std::size_t>(bi)] = assigned[static_cast<std::size_t>(bj)] = true;
        remaining -= 2;
        while (static_cast<int>(group.size()) < k && remaining > 0) {
            int pick = -1;
            double pick_mi = -1.0;
            for (int q = 0; q < n; ++q) {
                if (assigned[static_cast<std::size_t>(q)]) continue;
                QubitList sorted = group;
                std::sort(sorted.begin(), sorted.end());
                const double mi = group_mutual_information(ds, sorted, q);
                if (mi > pick_mi) {
                    pick_mi = mi;
                    pick = q;
                }
            }
            group.push_back(pick);
            assigned[static_cast<std::size_t>(pick)] = true;
            --remaining;
        }
        groups.push_back(std::move(group));
    }
    return Partition(n, std::move(groups), k);
}

/**
 * Node order: take the lowest unassigned qubit, then repeatedly add the
 * unassigned qubit with the largest summed MI to the current group members
 * until the group holds k qubits.
 */
inline Partition node_order_partition(const MIGraph &graph, int k) {
    detail::check_k(k);
    const int n = graph.qubits();
    std::vector<bool> assigned(static_cast<std::size_t>(n), false);
    std::vector<QubitList> groups;
    for (int seed = 0; seed < n; ++seed) {
        if (assigned[static_cast<std::size_t>(seed)]) continue;
        QubitList group{seed};
        assigned[static_cast<std::size_t>(seed)] = true;
        while (static_cast<int>(group.size()) < k) {
            int pick = -1;
            double pick_w = -1.0;
            for (int q = 0; q < n; ++q) {
                if (assigned[static_cast<std::size_t>(q)]) continue;
                double w = 0.0;
                for (int g : group) w += graph.weight(g, q);
                if (w > pick_w) {
                    pick_w = w;
                    pick = q;
                }
            }
            if (pick < 0) break;
            group.push_back(pick);
            assigned[static_cast<std::size_t>(pick)] = true;
        }
        groups.push_back(std::move(group));
    }
    return Partition(n, std::move(groups), k);
}

/**
 * Edge order: visit edges by descending weight (ties by lower i, then lower
 * j) and merge the endpoint groups unless the merged group would exceed k.
 * Zero-weight edges are skipped.
 */
inline Partition edge_order_partition(const MIGraph &graph, int k) {
    detail::check_k(k);
    const int n = graph.qubits();
    struct Edge {
        double w;
        int i, j;
    };
    std::vector<Edge> edges;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (graph.weight(i, j) > 0.0) edges.push_back({graph.weight(i, j), i, j});
        }
    }
    std::stable_sort(edges.begin(), edges.end(), [](const Edge &a, const Edge &b) {
        if (a.w != b.w) return a.w > b.w;
        if (a.i != b.i) return a.i < b.i;
        return a.j < b.j;
    });
    std::vector<int> label(static_cast<std::size_t>(n));
    std::iota(label.begin(), label.end(), 0);
    std::vector<QubitList> members(static_cast<std::size_t>(n));
    for (int q = 0; q < n; ++q) members[static_cast<std::size_t>(q)] = {q};
    for (const auto &e : edges) {
        const int a = label[static_cast<std::size_t>(e.i)];
        const int b = label[static_cast<std::size_t>(e.j)];
        if (a == b) continue;
        auto &ga = members[static_cast<std::size_t>(a)];
        auto &gb = members[static_cast<std::size_t>(b)];
        if (static_cast<int>(ga.size() + gb.size()) > k) continue;
        for (int q : gb) {
            label[static_cast<std::size_t>(q)] = a;
            ga.push_back(q);
        }
        gb.clear();
    }
    std::vector<QubitList> groups;
    for (auto &g : members) {
        if (!g.empty()) groups.push_back(std::move(g));
    }
    return Partition(n, std::move(groups), k);
}

/**
 * Weighted Newman modularity
 *   Q = (1/2W) sum_ij [w_ij - k_i k_j / 2W] delta(c_i, c_j),
 * with W half the total weight. Returns 0 for an all-zero graph.
 */
inline double modularity(const MIGraph &graph, const Partition &partition) {
    const int n = graph.qubits();
    if (partition.qubits() != n) throw DimensionError("modularity: partition size mismatch");
    const RealVector degree = graph.weights().rowwise().sum();
    const double two_w = degree.sum();
    if (two_w <= 0.0) return 0.0;
    double q = 0.0;
    for (const auto &group : partition.groups()) {
        double inside = 0.0;
        double total = 0.0;
        for (int i : group) {
            total += degree(i);
            for (int j : group) inside += graph.weight(i, j);
        }
        q += inside / two_w - (total / two_w) * (total / two_w);
    }
    return q;
}

}  // namespace kloshadows
