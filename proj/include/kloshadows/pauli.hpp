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

#include <bit>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "kloshadows/algebra.hpp"

namespace kloshadows {

struct PauliTerm {
    double coefficient = 0.0;
    std::string word;  ///< one letter of IXYZ per qubit, qubit 0 first
};

/** X and Z bit masks of a Pauli word (bit n-1-q for qubit q) plus the
 *  number of Y letters. */
struct PauliMasks {
    std::uint64_t x = 0;
    std::uint64_t z = 0;
    int y_count = 0;
};

inline PauliMasks pauli_masks(std::string_view word) {
    PauliMasks m;
    const auto n = word.size();
    if (n > 63) throw CapacityError("Pauli words longer than 63 qubits are unsupported");
    for (std::size_t q = 0; q < n; ++q) {
        const std::uint64_t bit = std::uint64_t{1} << (n - 1 - q);
        switch (word[q]) {
            case 'I': break;
            case 'X': m.x |= bit; break;
            case 'Y': m.x |= bit; m.z |= bit; ++m.y_count; break;
            case 'Z': m.z |= bit; break;
            default:
                throw ValidationError(std::string("invalid Pauli letter '") + word[q] + "'");
        }
    }
    return m;
}

/** Phase of <j xor x| P |j>: i^{#Y} * (-1)^{popcount(j & z)}. */
inline Complex pauli_phase(const PauliMasks &m, std::uint64_t j) {
    static const Complex kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    const int sign = (std::popcount(j & m.z) & 1) ? 2 : 0;
    return kIPow[(m.y_count + sign) % 4];
}

/** Dense matrix of a Pauli word. */
inline Matrix pauli_word_matrix(std::string_view word) {
    const auto m = pauli_masks(word);
    const auto dim = Eigen::Index{1} << word.size();
    Matrix out = Matrix::Zero(dim, dim);
    for (Eigen::Index j = 0; j < dim; ++j) {
        out(static_cast<Eigen::Index>(j ^ m.x), j) = pauli_phase(m, j);
    }
    return out;
}

/** Re Tr[A P] for an operator A on word.size() qubits. */
inline double trace_with_pauli(const Matrix &a, std::string_view word) {
    const auto m = pauli_masks(word);
    const auto dim = Eigen::Index{1} << word.size();
    if (a.rows() != dim || a.cols() != dim) {
        throw DimensionError("trace_with_pauli: operator size mismatch");
    }
    Complex acc = 0.0;
    for (Eigen::Index j = 0; j < dim; ++j) {
        acc += a(j, static_cast<Eigen::Index>(j ^ m.x)) *
               pauli_phase(m, static_cast<std::uint64_t>(j));
    }
    return acc.real();
}

inline bool is_identity_word(std::string_view word) {
    return word.find_first_not_of('I') == std::string_view::npos;
}

/**
 * Real-weighted sum of n-qubit Pauli strings. Duplicate words are merged at
 * construction (first appearance fixes the order).
 */
class PauliObservable {
   public:
    PauliObservable(int qubits, const std::vector<PauliTerm> &terms) : qubits_(qubits) {
        if (qubits < 1) throw ValidationError("observable needs at least one qubit");
        std::unordered_map<std::string, std::size_t> seen;
        for (const auto &t : terms) {
            if (static_cast<int>(t.word.size()) != qubits) {
                throw DimensionError("Pauli word '" + t.word + "' does not have " +
                                     std::to_string(qubits) + " letters");
            }
            if (!std::isfinite(t.coefficient)) {
                throw ValidationError("non-finite coefficient for '" + t.word + "'");
            }
            pauli_masks(t.word);
            auto [it, inserted] = seen.emplace(t.word, terms_.size());
            if (inserted) {
                terms_.push_back(t);
            } else {
                terms_[it->second].coefficient += t.coefficient;
            }
        }
    }

    int qubits() const { return qubits_; }
    const std::vector<PauliTerm> &terms() const { return terms_; }

    /** Sum of the identity-word coefficients. */
    double identity_coefficient() const {
        double c = 0.0;
        for (const auto &t : terms_) {
            if (is_identity_word(t.word)) c += t.coefficient;
        }
        return c;
    }

    PauliObservable without_identity() const {
        std::vector<PauliTerm> kept;
        for (const auto &t : terms_) {
            if (!is_identity_word(t.word)) kept.push_back(t);
        }
        return PauliObservable(qubits_, kept);
    }

    Matrix matrix(int max_qubits = 12) const {
        if (qubits_ > max_qubits) {
            throw CapacityError("observable on " + std::to_string(qubits_) +
                                " qubits exceeds the dense limit of " +
                                std::to_string(max_qubits));
        }
        const auto dim = Eigen::Index{1} << qubits_;
        Matrix out = Matrix::Zero(dim, dim);
        for (const auto &t : terms_) {
            const auto m = pauli_masks(t.word);
            for (Eigen::Index j = 0; j < dim; ++j) {
                out(static_cast<Eigen::Index>(j ^ m.x), j) +=
                    t.coefficient * pauli_phase(m, static_cast<std::uint64_t>(j));
            }
        }
        return out;
    }

   private:
    int qubits_;
    std::vector<PauliTerm> terms_;
};

}  // namespace kloshadows
