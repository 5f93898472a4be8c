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
 * @file toy.hpp
 * Two-qubit toy families and the ZZ variance / state MSE of four dual
 * choices: canonical, 1-LO, optimized product (1-local) and 2-LO.
 */

#include <array>
#include <string>

#include "kloshadows/duals.hpp"
#include "kloshadows/estimation.hpp"
#include "kloshadows/klo.hpp"
#include "kloshadows/product_duals.hpp"
#include "kloshadows/states.hpp"

namespace kloshadows {

enum class ToyFamily { Mixed, Pure };

inline ToyFamily parse_toy_family(const std::string &name) {
    if (name == "mixed") return ToyFamily::Mixed;
    if (name == "pure") return ToyFamily::Pure;
    throw ValidationError("unknown toy family '" + name + "'");
}

inline std::string toy_family_name(ToyFamily f) { return f == ToyFamily::Mixed ? "mixed" : "pure"; }

/** (1-q)|00><00| + q|11><11| or sqrt(1-q^2)|00> + q|11>. */
inline State toy_state(ToyFamily family, double q) {
    if (family == ToyFamily::Mixed) return classical_mixture_toy(q);
    return weighted_bell_toy(q);
}

inline constexpr std::array<const char *, 4> kToyColumns = {"canonical", "1-LO", "optimized-1-local", "2-LO"};

struct ToyPoint {
    double q = 0.0;
    std::array<double, 4> variance{};
    std::array<double, 4> mse{};
    int sweeps = 0;
};

inline ToyPoint toy_point(ToyFamily family, double q) {
    const State state = toy_state(family, q);
    const auto povm = ProductPovm::uniform(pauli6(), 2);
    const PauliObservable zz(2, {{1.0, "ZZ"}});
    const auto joint = joint_probabilities(state, povm);
    const Matrix rho = to_density(state).matrix();
    const auto singles = Partition::singletons(2);
    const auto optimized = optimize_product_duals(joint, singles, povm);
    const std::array<GlobalDuals, 4> duals = {
        canonical_global_duals(povm, singles), local_optimal_duals(state, povm, singles, kDefaultProbabilityFloor, 1),
        optimized.duals, local_optimal_duals(state, povm, Partition::single_group(2), kDefaultProbabilityFloor, 1)};
    ToyPoint out;
    out.q = q;
    out.sweeps = optimized.sweeps;
    ExactVarianceOptions ev;
    ev.workers = 1;
    for (std::size_t j = 0; j < duals.size(); ++j) {
        out.variance[j] = exact_variance(state, povm, duals[j], zz, ev);
        out.mse[j] = product_state_mse(duals[j], joint, rho, povm);
    }
    return out;
}

}  // namespace kloshadows
