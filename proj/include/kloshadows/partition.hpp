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

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "kloshadows/algebra.hpp"

namespace kloshadows {

/**
 * Disjoint groups of qubits covering 0..n-1. Groups are stored ascending and
 * sorted by their smallest qubit, so equal partitions compare equal.
 */
class Partition {
   public:
    Partition() = default;

    /** max_group_size = 0 disables the size check. */
    Partition(int qubits, std::vector<QubitList> groups, int max_group_size = 0)
        : qubits_(qubits), groups_(std::move(groups)) {
        if (qubits < 1) throw ValidationError("partition needs at least one qubit");
        std::vector<int> owner(static_cast<std::size_t>(qubits), -1);
        for (std::size_t g = 0; g < groups_.size(); ++g) {
            auto &group = groups_[g];
            if (group.empty()) throw ValidationError("partition contains an empty group");
            std::sort(group.begin(), group.end());
            if (max_group_size > 0 && static_cast<int>(group.size()) > max_group_size) {
                throw ValidationError("group larger than the maximum size " +
                                      std::to_string(max_group_size));
            }
            for (int q : group) {
                if (q < 0 || q >= qubits) {
                    throw IndexError("qubit " + std::to_string(q) + " out of range");
                }
                if (owner[static_cast<std::size_t>(q)] != -1) {
                    throw ValidationError("qubit " + std::to_string(q) +
                                          " appears in two groups");
                }
                owner[static_cast<std::size_t>(q)] = static_cast<int>(g);
            }
        }
        for (int q = 0; q < qubits; ++q) {
            if (owner[static_cast<std::size_t>(q)] == -1) {
                throw ValidationError("qubit " + std::to_string(q) + " is not covered");
            }
        }
        std::sort(groups_.begin(), groups_.end(),
                  [](const QubitList &a, const QubitList &b) { return a.front() < b.front(); });
    }

    static Partition singletons(int qubits) {
        std::vector<QubitList> groups;
        for (int q = 0; q < qubits; ++q) groups.push_back({q});
        return Partition(qubits, std::move(groups));
    }

    static Partition single_group(int qubits) {
        QubitList all(static_cast<std::size_t>(qubits));
        for (int q = 0; q < qubits; ++q) all[static_cast<std::size_t>(q)] = q;
        return Partition(qubits, {all});
    }

    int qubits() const { return qubits_; }
    const std::vector<QubitList> &groups() const { return groups_; }
    std::size_t size() const { return groups_.size(); }

    int max_group_size() const {
        std::size_t m = 0;
        for (const auto &g : groups_) m = std::max(m, g.size());
        return static_cast<int>(m);
    }

    /** Index of the group containing qubit q. */
    std::size_t group_of(int q) const {
        for (std::size_t g = 0; g < groups_.size(); ++g) {
            if (std::find(groups_[g].begin(), groups_[g].end(), q) != groups_[g].end()) {
                return g;
            }
        }
        throw IndexError("qubit " + std::to_string(q) + " not in partition");
    }

    /** "(0, 1), (2, 3)" */
    std::string to_string() const {
        std::string out;
        for (std::size_t g = 0; g < groups_.size(); ++g) {
            if (g) out += ", ";
            out += "(";
            for (std::size_t j = 0; j < groups_[g].size(); ++j) {
                if (j) out += ", ";
                out += std::to_string(groups_[g][j]);
            }
            out += ")";
        }
        return out;
    }

    friend bool operator==(const Partition &, const Partition &) = default;

   private:
    int qubits_ = 0;
    std::vector<QubitList> groups_;
};

}  // namespace kloshadows
