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
 * @file klo.hpp
 * k-locally optimal duals: partition the qubits by mutual information,
 * reconstruct each group's state from its marginal counts and build optimal
 * duals for every group.
 */

#include <optional>
#include <string>
#include <vector>

#include "kloshadows/correlations.hpp"
#include "kloshadows/duals.hpp"
#include "kloshadows/parallel.hpp"
#include "kloshadows/states.hpp"
#include "kloshadows/tomography.hpp"

namespace kloshadows {

enum class Partitioner { Greedy, Naive, NodeOrder, EdgeOrder };

inline std::string partitioner_name(Partitioner p) {
    switch (p) {
        case Partitioner::Greedy: return "greedy";
        case Partitioner::Naive: return "naive";
        case Partitioner::NodeOrder: return "node";
        case Partitioner::EdgeOrder: return "edge";
    }
    return "unknown";
}

inline Partitioner parse_partitioner(const std::string &name) {
    if (name == "greedy") return Partitioner::Greedy;
    if (name == "naive") return Partitioner::Naive;
    if (name == "node") return Partitioner::NodeOrder;
    if (name == "edge") return Partitioner::EdgeOrder;
    throw ValidationError("unknown partitioner '" + name + "'");
}

inline Partition make_partition(const Dataset &ds, int k, Partitioner method, unsigned workers = 0) {
    switch (method) {
        case Partitioner::Greedy: return greedy_partition(ds, k, workers);
        case Partitioner::Naive: return naive_partition(ds.qubits(), k);
        case Partitioner::NodeOrder: return node_order_partition(mi_graph(ds, workers), k);
        case Partitioner::EdgeOrder: return edge_order_partition(mi_graph(ds, workers), k);
    }
    throw ValidationError("unknown partitioner");
}

struct KloOptions {
    int k = 4;
    TomographyBackend backend = ConstrainedLad{};
    Partitioner partitioner = Partitioner::Greedy;
    double floor = kDefaultProbabilityFloor;
    unsigned workers = 0;
    TomographyOptions tomography{};
    /** Skips partitioning when set. */
    std::optional<Partition> partition;
};

struct KloResult {
    GlobalDuals duals;
    std::vector<Reconstruction> reconstructions;
};

inline std::string klo_provenance(int k, const TomographyBackend &backend) {
    return std::to_string(k) + "-LO(" + backend_name(backend) + ")";
}

/** Full pipeline; per-group work runs in parallel and is deterministic. */
inline KloResult klo_pipeline(const Dataset &ds, const ProductPovm &povm, const KloOptions &options = {}) {
    if (ds.shots() == 0) throw ValidationError("klo_duals: empty dataset");
    if (ds.qubits() != povm.qubits()) throw DimensionError("klo_duals: dataset and POVM qubit counts differ");
    const Partition partition =
        options.partition ? *options.partition : make_partition(ds, options.k, options.partitioner, options.workers);
    if (partition.qubits() != ds.qubits()) throw DimensionError("klo_duals: partition size mismatch");
    const auto &groups = partition.groups();
    std::vector<std::optional<Reconstruction>> recs(groups.size());
    std::vector<std::optional<DualFrame>> frames(groups.size());
    const int locality = options.partition ? partition.max_group_size() : options.k;
    const std::string provenance = klo_provenance(locality, options.backend);
    parallel_for(groups.size(), options.workers, [&](std::size_t begin, std::size_t end) {
        for (std::size_t g = begin; g < end; ++g) {
            const MarginalTable table = marginal_counts(ds, groups[g]);
            recs[g] = reconstruct(table, povm, options.backend, options.tomography);
            frames[g] = optimal_duals(povm, groups[g], recs[g]->probabilities, options.floor, provenance);
        }
    });
    std::vector<DualFrame> out_frames;
    std::vector<Reconstruction> out_recs;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        out_frames.push_back(std::move(*frames[g]));
        out_recs.push_back(std::move(*recs[g]));
    }
    return {GlobalDuals(partition, std::move(out_frames)), std::move(out_recs)};
}

inline GlobalDuals klo_duals(const Dataset &ds, const ProductPovm &povm, const KloOptions &options = {}) {
    return klo_pipeline(ds, povm, options).duals;
}

/** Optimal duals per group from exact reduced density matrices. */
inline GlobalDuals local_optimal_duals(const State &state, const ProductPovm &povm, const Partition &partition,
                                       double floor = kDefaultProbabilityFloor, unsigned workers = 0) {
    if (partition.qubits() != state_qubits(state)) throw DimensionError("partition and state qubit counts differ");
    const auto &groups = partition.groups();
    std::vector<std::optional<DualFrame>> frames(groups.size());
    const std::string provenance = std::to_string(partition.max_group_size()) + "-LO(exact)";
    parallel_for(groups.size(), workers, [&](std::size_t begin, std::size_t end) {
        for (std::size_t g = begin; g < end; ++g) {
            const DensityMatrix rdm = reduced_density(state, groups[g]);
            const auto p = predicted_probabilities(rdm.matrix(), group_effects(povm, groups[g]));
            frames[g] = optimal_duals(povm, groups[g], p, floor, provenance);
        }
    });
    std::vector<DualFrame> out;
    for (auto &f : frames) out.push_back(std::move(*f));
    return GlobalDuals(partition, std::move(out));
}

/** Optimal duals per group from given group states (e.g. loaded RDM files). */
inline GlobalDuals duals_from_states(const Partition &partition, const std::vector<DensityMatrix> &states,
                                     const ProductPovm &povm, const std::string &provenance,
                                     double floor = kDefaultProbabilityFloor) {
    if (states.size() != partition.size()) throw DimensionError("one state per group is required");
    std::vector<DualFrame> out;
    for (std::size_t g = 0; g < states.size(); ++g) {
        const auto &group = partition.groups()[g];
        const auto p = predicted_probabilities(states[g].matrix(), group_effects(povm, group));
        out.push_back(optimal_duals(povm, group, p, floor, provenance));
    }
    return GlobalDuals(partition, std::move(out));
}

}  // namespace kloshadows
