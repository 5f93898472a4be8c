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

#include <random>

#include <gtest/gtest.h>

#include "kloshadows/correlations.hpp"
#include "kloshadows/sampling.hpp"
#include "kloshadows/states.hpp"
#include "oracles.hpp"

namespace ks = kloshadows;

namespace {

double max_diff(const ks::Matrix &a, const ks::Matrix &b) { return ks::max_abs(a - b); }

ks::ProductPovm pauli6_povm(int n) { return ks::ProductPovm::uniform(ks::pauli6(), n); }

ks::State random_mixed(int n, std::mt19937_64 &rng) {
    return ks::DensityMatrix(oracle::random_density(Eigen::Index{1} << n, rng));
}

}  // namespace

TEST(States, ConstructionValidates) {
    ks::Vector v = ks::Vector::Zero(4);
    v(0) = 1.0;
    EXPECT_NO_THROW(ks::PureState{v});
    EXPECT_THROW(ks::PureState(v * 2.0), ks::ValidationError);
    EXPECT_THROW(ks::PureState(ks::Vector::Ones(3) / std::sqrt(3.0)), ks::DimensionError);
    ks::Vector big = ks::Vector::Zero(1 << 15);
    big(0) = 1.0;
    EXPECT_THROW(ks::PureState{big}, ks::CapacityError);

    ks::Matrix m = ks::Matrix::Zero(2, 2);
    m(0, 0) = 1.5;
    m(1, 1) = -0.5;
    EXPECT_THROW(ks::DensityMatrix{m}, ks::ValidationError);
    m(1, 1) = 0.0;
    EXPECT_THROW(ks::DensityMatrix{m}, ks::ValidationError);
}

TEST(States, OutcomeProbabilityExamples) {
    const auto povm = pauli6_povm(1);
    const ks::State zero = ks::product_state("0");
    const double expected[6] = {1.0 / 3, 0.0, 1.0 / 6, 1.0 / 6, 1.0 / 6, 1.0 / 6};
    for (int m = 0; m < 6; ++m) {
        const int out[1] = {m};
        EXPECT_NEAR(ks::outcome_probability(zero, povm, out), expected[m], 1e-15);
    }
    const auto povm2 = pauli6_povm(2);
    const ks::State bell = ks::bell_state();
    const int zz[2] = {0, 0};
    const int zz01[2] = {0, 1};
    EXPECT_NEAR(ks::outcome_probability(bell, povm2, zz), 1.0 / 18, 1e-15);
    EXPECT_NEAR(ks::outcome_probability(bell, povm2, zz01), 0.0, 1e-15);
    const int bad[2] = {0, 6};
    EXPECT_THROW(ks::outcome_probability(bell, povm2, bad), ks::IndexError);
}

TEST(States, ProbabilitiesSumToOneAndAgreeAcrossRepresentations) {
    std::mt19937_64 rng(21);
    const auto povm = pauli6_povm(2);
    const auto effects = oracle::pauli6_pair_effects();
    const ks::Vector psi = oracle::random_pure(4, rng);
    const ks::State pure = ks::PureState(psi);
    const ks::State dense = ks::DensityMatrix(psi * psi.adjoint());
    const ks::State blocks = ks::grouped_product_state(pure, ks::Partition::single_group(2));
    double total = 0.0;
    for (int a = 0; a < 6; ++a) {
        for (int b = 0; b < 6; ++b) {
            const int out[2] = {a, b};
            const double p = ks::outcome_probability(pure, povm, out);
            const double direct = (effects[static_cast<std::size_t>(6 * a + b)] * psi * psi.adjoint()).trace().real();
            EXPECT_NEAR(p, direct, 1e-14);
            EXPECT_NEAR(ks::outcome_probability(dense, povm, out), p, 1e-14);
            EXPECT_NEAR(ks::outcome_probability(blocks, povm, out), p, 1e-14);
            total += p;
        }
    }
    EXPECT_NEAR(total, 1.0, 1e-8);
}

TEST(States, ReducedAndGroupedStates) {
    const ks::State bell = ks::bell_state();
    const auto grouped = ks::grouped_product_state(bell, ks::Partition::singletons(2));
    const ks::Matrix half = ks::Matrix::Identity(2, 2) / 2.0;
    for (const auto &b : grouped.blocks()) EXPECT_LT(max_diff(b.matrix(), half), 1e-15);
    EXPECT_LT(max_diff(ks::to_density(grouped).matrix(), ks::Matrix::Identity(4, 4) / 4.0), 1e-15);

    const auto full = ks::grouped_product_state(bell, ks::Partition::single_group(2));
    EXPECT_LT(max_diff(full.blocks()[0].matrix(), std::get<ks::PureState>(bell).density()), 1e-15);

    const ks::State prod = ks::product_state("0+r");
    const ks::Partition p(3, {{0, 2}, {1}});
    EXPECT_LT(max_diff(ks::to_density(ks::grouped_product_state(prod, p)).matrix(),
                       ks::to_density(prod).matrix()),
              1e-14);

    std::mt19937_64 rng(22);
    const ks::State rho = random_mixed(3, rng);
    const std::vector<int> keep{0, 2};
    EXPECT_LT(max_diff(ks::reduced_density(rho, keep).matrix(),
                       oracle::partial_trace(std::get<ks::DensityMatrix>(rho).matrix(), 3, keep)),
              1e-14);

    const auto once = ks::grouped_product_state(rho, p);
    const auto twice = ks::grouped_product_state(once, p);
    for (std::size_t g = 0; g < once.blocks().size(); ++g) {
        EXPECT_LT(max_diff(once.blocks()[g].matrix(), twice.blocks()[g].matrix()), 1e-14);
    }
    // Reduced density of a block state across two blocks.
    const std::vector<int> cross{1, 2};
    EXPECT_LT(max_diff(ks::reduced_density(once, cross).matrix(),
                       oracle::partial_trace(ks::to_density(once).matrix(), 3, cross)),
              1e-14);
}

TEST(States, ExpectationAndGroundState) {
    const ks::PauliObservable z(1, {{1.0, "Z"}});
    const auto gz = ks::ground_state(z);
    EXPECT_NEAR(gz.energy, -1.0, 1e-14);
    EXPECT_NEAR(std::abs(gz.state.amplitudes()(1)), 1.0, 1e-14);
    const ks::PauliObservable mx(1, {{-1.0, "X"}});
    const auto gx = ks::ground_state(mx);
    EXPECT_NEAR(gx.energy, -1.0, 1e-14);
    EXPECT_NEAR(gx.state.amplitudes()(0).real(), 1.0 / std::sqrt(2.0), 1e-12);
    EXPECT_NEAR(gx.state.amplitudes()(1).real(), 1.0 / std::sqrt(2.0), 1e-12);

    const ks::PauliObservable h(3, {{0.3, "ZZI"}, {-0.7, "XIX"}, {0.2, "IYY"}, {0.1, "III"}});
    const auto g = ks::ground_state(h);
    const ks::Matrix dense = oracle::pauli_matrix("ZZI") * 0.3 - oracle::pauli_matrix("XIX") * 0.7 +
                             oracle::pauli_matrix("IYY") * 0.2 + oracle::pauli_matrix("III") * 0.1;
    Eigen::SelfAdjointEigenSolver<ks::Matrix> solver(dense);
    EXPECT_NEAR(g.energy, solver.eigenvalues()(0), 1e-10);
    EXPECT_NEAR(ks::expectation(g.state, h), g.energy, 1e-9);
    const ks::State as_density = ks::DensityMatrix(g.state.density());
    EXPECT_NEAR(ks::expectation(as_density, h), g.energy, 1e-9);
}

TEST(States, NamedStates) {
    const auto pairs = ks::bell_pairs(2);
    EXPECT_EQ(pairs.qubits(), 4);
    EXPECT_EQ(pairs.partition(), ks::Partition(4, {{0, 1}, {2, 3}}));
    EXPECT_THROW(ks::ghz_state(1), ks::ValidationError);
    EXPECT_THROW(ks::product_state("0x"), ks::ValidationError);
    EXPECT_THROW(ks::classical_mixture_toy(1.5), ks::ValidationError);
    EXPECT_NEAR(ks::weighted_bell_toy(0.6).amplitudes()(0).real(), 0.8, 1e-15);
}

TEST(Sampling, ZeroProbabilityOutcomeNeverOccurs) {
    const auto ds = ks::sample_shots(ks::product_state("0"), pauli6_povm(1), 1000, 3);
    EXPECT_EQ(ds.shots(), 1000U);
    for (auto r : ds.records()) EXPECT_NE(r, 1);
}

TEST(Sampling, FrequencyOfZeroOutcome) {
    const std::uint64_t shots = 1000000;
    const auto ds = ks::sample_shots(ks::product_state("0"), pauli6_povm(1), shots, 4);
    const std::vector<int> g{0};
    const auto table = ks::marginal_counts(ds, g);
    const double p = 1.0 / 3.0;
    const double sigma = std::sqrt(p * (1 - p) * static_cast<double>(shots));
    EXPECT_NEAR(static_cast<double>(table.counts[0]), p * static_cast<double>(shots), 5 * sigma);
}

TEST(Sampling, DeterministicAcrossWorkersAndRepresentations) {
    const auto povm = pauli6_povm(4);
    const ks::State blocks = ks::bell_pairs(2);
    ks::SamplingOptions one;
    one.workers = 1;
    ks::SamplingOptions many;
    many.workers = 5;
    const auto a = ks::sample_shots(blocks, povm, 20000, 77, one);
    const auto b = ks::sample_shots(blocks, povm, 20000, 77, many);
    EXPECT_EQ(a, b);
    EXPECT_EQ(a, ks::sample_shots(blocks, povm, 20000, 77, one));
    EXPECT_NE(a, ks::sample_shots(blocks, povm, 20000, 78, one));

    const ks::State pure = ks::bell_state();
    const ks::State dense = ks::DensityMatrix(ks::bell_state().density());
    const auto p2 = pauli6_povm(2);
    EXPECT_EQ(ks::sample_shots(pure, p2, 5000, 9, one), ks::sample_shots(pure, p2, 5000, 9, many));
    EXPECT_EQ(ks::sample_shots(dense, p2, 5000, 9, one), ks::sample_shots(dense, p2, 5000, 9, many));
}

TEST(Sampling, EmpiricalFrequenciesMatchBornRule) {
    std::mt19937_64 rng(31);
    const auto povm = pauli6_povm(2);
    const ks::Vector psi = oracle::random_pure(4, rng);
    const ks::State pure = ks::PureState(psi);
    const ks::State dense = random_mixed(2, rng);
    const std::uint64_t shots = 100000;
    const std::vector<int> g{0, 1};
    for (const ks::State *state : {&pure, &dense}) {
        const auto table = ks::marginal_counts(ks::sample_shots(*state, povm, shots, 12), g);
        for (int a = 0; a < 6; ++a) {
            for (int b = 0; b < 6; ++b) {
                const int out[2] = {a, b};
                const double p = ks::outcome_probability(*state, povm, out);
                const double sigma = std::sqrt(std::max(p * (1 - p), 1e-12) * static_cast<double>(shots));
                EXPECT_NEAR(static_cast<double>(table.counts[static_cast<std::size_t>(6 * a + b)]),
                            p * static_cast<double>(shots), 5 * sigma + 1e-9);
            }
        }
    }
}

TEST(Sampling, ReportsInvalidInput) {
    EXPECT_THROW(ks::sample_shots(ks::bell_state(), pauli6_povm(3), 10, 1), ks::DimensionError);
    EXPECT_THROW(ks::Dataset(2, 6, 0, "pauli6", {0, 1, 2}), ks::DimensionError);
    EXPECT_THROW(ks::Dataset(1, 6, 0, "pauli6", {6}), ks::IndexError);
}

TEST(Sampling, MarginalCountsMatchRecount) {
    const auto ds = ks::sample_shots(ks::ghz_state(3), pauli6_povm(3), 3000, 5);
    const std::vector<int> g{0, 2};
    const auto table = ks::marginal_counts(ds, g);
    std::vector<std::uint64_t> recount(36, 0);
    for (std::uint64_t s = 0; s < ds.shots(); ++s) {
        const auto shot = ds.shot(s);
        ++recount[static_cast<std::size_t>(shot[0]) * 6 + shot[2]];
    }
    EXPECT_EQ(table.counts, recount);

    const std::vector<int> all{0, 1, 2};
    const auto full = ks::marginal_counts(ds, all);
    EXPECT_EQ(ks::marginalize(full, g).counts, table.counts);
    const std::vector<int> g0{0};
    EXPECT_EQ(ks::marginalize(table, g0).counts, ks::marginal_counts(ds, g0).counts);
    EXPECT_EQ(ks::marginalize(full, g0).counts, ks::marginal_counts(ds, g0).counts);

    const auto single = ks::sample_shots(ks::product_state("+"), pauli6_povm(1), 500, 1);
    const auto hist = ks::marginal_counts(single, g0);
    std::uint64_t total = 0;
    for (auto c : hist.counts) total += c;
    EXPECT_EQ(total, 500U);
    EXPECT_THROW(ks::marginal_counts(ds, all, 2), ks::CapacityError);
}

TEST(Correlations, MutualInformationMatchesOracle) {
    const std::vector<std::uint64_t> counts{10, 0, 3, 7, 5, 5};
    const std::vector<std::vector<double>> p{{10 / 30.0, 0.0}, {3 / 30.0, 7 / 30.0}, {5 / 30.0, 5 / 30.0}};
    EXPECT_NEAR(ks::mutual_information(counts, 3, 2), oracle::mutual_information(p), 1e-14);
    const std::vector<std::uint64_t> independent{4, 8, 2, 4};
    EXPECT_NEAR(ks::mutual_information(independent, 2, 2), 0.0, 1e-15);
    const std::vector<std::uint64_t> empty{0, 0, 0, 0};
    EXPECT_THROW(ks::mutual_information(empty, 2, 2), ks::ValidationError);
}

TEST(Correlations, PairMutualInformation) {
    const auto povm = pauli6_povm(2);
    const auto product = ks::sample_shots(ks::product_state("0+"), povm, 100000, 2);
    EXPECT_LT(ks::pair_mutual_information(product, 0, 1), 1e-3);
    const auto bell = ks::sample_shots(ks::bell_state(), povm, 100000, 2);
    const double mi = ks::pair_mutual_information(bell, 0, 1);
    EXPECT_GT(mi, 0.1);
    EXPECT_EQ(mi, ks::pair_mutual_information(bell, 1, 0));
    EXPECT_THROW(ks::pair_mutual_information(bell, 1, 1), ks::IndexError);

    // Exact Bell marginals: (a, b) probability 1/18 when the bases agree and
    // outcomes match, 0 when they disagree, 1/36 across bases.
    std::vector<std::vector<double>> p(6, std::vector<double>(6, 1.0 / 36));
    for (int b = 0; b < 3; ++b) {
        p[2 * b][2 * b] = p[2 * b + 1][2 * b + 1] = 1.0 / 18;
        p[2 * b][2 * b + 1] = p[2 * b + 1][2 * b] = 0.0;
    }
    p[4][4] = p[5][5] = 0.0;
    p[4][5] = p[5][4] = 1.0 / 18;
    EXPECT_NEAR(mi, oracle::mutual_information(p), 0.01);
}

TEST(Correlations, GraphIsSymmetricAndWorkerIndependent) {
    const auto ds = ks::sample_shots(ks::bell_pairs(2), pauli6_povm(4), 20000, 8);
    const auto g1 = ks::mi_graph(ds, 1);
    const auto g3 = ks::mi_graph(ds, 3);
    EXPECT_EQ(g1.weights(), g3.weights());
    for (int i = 0; i < 4; ++i) {
        EXPECT_EQ(g1.weight(i, i), 0.0);
        for (int j = 0; j < 4; ++j) EXPECT_EQ(g1.weight(i, j), g1.weight(j, i));
    }
    ks::RealMatrix asym = ks::RealMatrix::Zero(2, 2);
    asym(0, 1) = 1.0;
    EXPECT_THROW(ks::MIGraph{asym}, ks::ValidationError);
}

TEST(Correlations, NaivePartitionRows) {
    EXPECT_EQ(ks::naive_partition(14, 2).to_string(),
              "(0, 1), (2, 3), (4, 5), (6, 7), (8, 9), (10, 11), (12, 13)");
    EXPECT_EQ(ks::naive_partition(14, 4).to_string(),
              "(0, 1, 2, 3), (4, 5, 6, 7), (8, 9, 10, 11), (12, 13)");
    EXPECT_THROW(ks::naive_partition(4, 0), ks::ValidationError);
}

TEST(Correlations, GraphPartitioners) {
    ks::RealMatrix w = ks::RealMatrix::Zero(6, 6);
    for (int base : {0, 3}) {
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                if (i != j) w(base + i, base + j) = 1.0;
            }
        }
    }
    const ks::MIGraph cliques(w);
    const ks::Partition triangles(6, {{0, 1, 2}, {3, 4, 5}});
    EXPECT_EQ(ks::node_order_partition(cliques, 3), triangles);
    EXPECT_EQ(ks::edge_order_partition(cliques, 3), triangles);
    EXPECT_NEAR(ks::modularity(cliques, triangles), 0.5, 1e-14);
    EXPECT_NEAR(ks::modularity(cliques, ks::Partition::single_group(6)), 0.0, 1e-14);

    const ks::MIGraph zero(ks::RealMatrix::Zero(6, 6));
    EXPECT_EQ(ks::node_order_partition(zero, 2), ks::naive_partition(6, 2));
    EXPECT_EQ(ks::modularity(zero, triangles), 0.0);

    ks::RealMatrix dom = ks::RealMatrix::Constant(6, 6, 0.01);
    dom(0, 5) = dom(5, 0) = 1.0;
    const auto edge = ks::edge_order_partition(ks::MIGraph(dom), 2);
    EXPECT_EQ(edge.groups()[edge.group_of(0)], (ks::QubitList{0, 5}));
}

TEST(Correlations, PartitionersAreValidOnRandomGraphs) {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int n = 1; n <= 8; ++n) {
        ks::RealMatrix w = ks::RealMatrix::Zero(n, n);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < i; ++j) w(i, j) = w(j, i) = u(rng) < 0.3 ? 0.0 : u(rng);
        }
        const ks::MIGraph g(w);
        std::vector<int> label(static_cast<std::size_t>(n));
        for (int k = 1; k <= n; ++k) {
            for (const auto &p : {ks::node_order_partition(g, k), ks::edge_order_partition(g, k),
                                  ks::naive_partition(n, k)}) {
                EXPECT_EQ(p.qubits(), n);
                EXPECT_LE(p.max_group_size(), k);
                for (int q = 0; q < n; ++q) label[static_cast<std::size_t>(q)] = static_cast<int>(p.group_of(q));
                EXPECT_NEAR(ks::modularity(g, p), oracle::modularity(w, label), 1e-12);
            }
        }
    }
}

TEST(Correlations, GreedyRecoversBlocks) {
    const auto ds = ks::sample_shots(ks::bell_pairs(2), pauli6_povm(4), 100000, 1);
    EXPECT_EQ(ks::greedy_partition(ds, 2), ks::Partition(4, {{0, 1}, {2, 3}}));
    EXPECT_EQ(ks::greedy_partition(ds, 2, 1), ks::greedy_partition(ds, 2, 4));

    // Two interleaved GHZ blocks with k equal to the block size.
    const ks::Partition truth(6, {{0, 2, 5}, {1, 3, 4}});
    const ks::BlockProductState state(
        truth, {ks::DensityMatrix(ks::ghz_state(3).density()), ks::DensityMatrix(ks::ghz_state(3).density())});
    const auto big = ks::sample_shots(state, pauli6_povm(6), 100000, 3);
    EXPECT_EQ(ks::greedy_partition(big, 3), truth);
    EXPECT_EQ(ks::greedy_partition(big, 6), ks::Partition::single_group(6));
    EXPECT_EQ(ks::greedy_partition(big, 1), ks::Partition::singletons(6));
    // Groups are always filled to k, so a lone block of 2 absorbs a third qubit.
    const auto mixed = ks::sample_shots(ks::bell_pairs(2), pauli6_povm(4), 20000, 4);
    EXPECT_EQ(ks::greedy_partition(mixed, 3).max_group_size(), 3);
}
