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
#include <sstream>

#include <gtest/gtest.h>

#include "kloshadows/estimation.hpp"
#include "kloshadows/io.hpp"
#include "kloshadows/klo.hpp"
#include "kloshadows/state_spec.hpp"
#include "oracles.hpp"

namespace ks = kloshadows;

namespace {

ks::ProductPovm pauli6_povm(int n) { return ks::ProductPovm::uniform(ks::pauli6(), n); }

std::string random_word(int n, std::mt19937_64 &rng) {
    static const char letters[] = "IXYZ";
    std::uniform_int_distribution<int> pick(0, 3);
    std::string w;
    for (int q = 0; q < n; ++q) w += letters[pick(rng)];
    return w;
}

ks::GlobalDuals random_joint_duals(std::mt19937_64 &rng) {
    const auto povm = pauli6_povm(2);
    const auto effects = ks::group_effects(povm, std::vector<int>{0, 1});
    std::uniform_real_distribution<double> u(0.1, 10.0);
    ks::RealVector w(36);
    for (auto &x : w) x = u(rng);
    return ks::GlobalDuals(ks::Partition::single_group(2),
                           {ks::DualFrame({0, 1}, ks::duals_from_weights(effects, w), "random")});
}

std::vector<ks::Matrix> joint_duals(const ks::GlobalDuals &duals) {
    const auto &p = duals.partition();
    if (p.size() == 1) return duals.frame(0).duals();
    std::vector<ks::Matrix> out;
    for (const auto &a : duals.frame(0).duals()) {
        for (const auto &b : duals.frame(1).duals()) out.push_back(ks::kron(a, b));
    }
    return out;
}

}  // namespace

TEST(Estimation, BellZZCanonicalVarianceIsEight) {
    const auto povm = pauli6_povm(2);
    const ks::State bell = ks::bell_state();
    const auto duals = ks::canonical_global_duals(povm, ks::Partition::singletons(2));
    const ks::PauliObservable zz(2, {{1.0, "ZZ"}});
    const auto m = ks::exact_moments(bell, povm, duals, zz);
    EXPECT_NEAR(m.mean, 1.0, 1e-12);
    EXPECT_NEAR(m.variance(), 8.0, 1e-10);
    const auto brute = oracle::enumerate_moments(std::get<ks::PureState>(bell).density(),
                                                 oracle::pauli6_pair_effects(), joint_duals(duals),
                                                 oracle::pauli_matrix("ZZ"));
    EXPECT_NEAR(brute.variance, 8.0, 1e-10);
}

TEST(Estimation, ExactVarianceMatchesEnumeration) {
    std::mt19937_64 rng(71);
    std::normal_distribution<double> g;
    const auto povm = pauli6_povm(2);
    const auto effects = oracle::pauli6_pair_effects();
    for (int t = 0; t < 30; ++t) {
        const ks::Matrix rho = oracle::random_density(4, rng);
        ks::GlobalDuals duals = random_joint_duals(rng);
        if (t % 3 == 1) {
            const auto p = ks::predicted_probabilities(oracle::random_density(2, rng),
                                                       ks::group_effects(povm, std::vector<int>{0}));
            duals = ks::GlobalDuals(ks::Partition::singletons(2),
                                    {ks::optimal_duals(povm, std::vector<int>{0}, p),
                                     ks::canonical_duals(povm, std::vector<int>{1})});
        }
        const ks::PauliObservable obs(2, {{g(rng), random_word(2, rng)}, {g(rng), random_word(2, rng)}});
        const auto lib = ks::exact_moments(ks::DensityMatrix(rho), povm, duals, obs);
        const auto brute = oracle::enumerate_moments(rho, effects, joint_duals(duals), obs.matrix());
        EXPECT_NEAR(lib.mean, brute.mean, 1e-10);
        EXPECT_NEAR(lib.variance(), brute.variance, 1e-10);
        EXPECT_NEAR(lib.mean, (rho * obs.matrix()).trace().real(), 1e-8);
    }
}

TEST(Estimation, RepresentationsAgree) {
    std::mt19937_64 rng(72);
    const auto povm = pauli6_povm(4);
    const auto state = ks::bell_pairs(2);
    const ks::State dense = ks::to_density(state);
    const ks::State pure = ks::PureState(ks::kron(ks::bell_state().amplitudes(), ks::bell_state().amplitudes()));
    const ks::PauliObservable obs(4, {{0.5, "ZZII"}, {-0.3, "XIXI"}, {0.7, "IYYI"}, {0.2, "IIII"}});
    const auto duals = ks::local_optimal_duals(state, povm, ks::Partition(4, {{0, 2}, {1, 3}}));
    const double a = ks::exact_variance(state, povm, duals, obs);
    EXPECT_NEAR(ks::exact_variance(dense, povm, duals, obs), a, 1e-10);
    EXPECT_NEAR(ks::exact_variance(pure, povm, duals, obs), a, 1e-10);
    ks::ExactVarianceOptions tiny;
    tiny.max_term_pairs = 3;
    EXPECT_THROW(ks::exact_variance(state, povm, duals, obs, tiny), ks::CapacityError);
}

TEST(Estimation, OptimalDualsMinimizeVariance) {
    std::mt19937_64 rng(73);
    std::normal_distribution<double> g;
    const auto povm = pauli6_povm(2);
    const std::vector<int> all{0, 1};
    const ks::Matrix rho = oracle::random_density(4, rng);
    const ks::State state = ks::DensityMatrix(rho);
    const auto opt = ks::local_optimal_duals(state, povm, ks::Partition::single_group(2));
    const auto can = ks::canonical_global_duals(povm, ks::Partition::singletons(2));
    for (int t = 0; t < 10; ++t) {
        std::vector<ks::PauliTerm> terms;
        for (int j = 0; j < 4; ++j) terms.push_back({g(rng), random_word(2, rng)});
        const ks::PauliObservable obs(2, terms);
        const double v = ks::exact_variance(state, povm, opt, obs);
        EXPECT_LE(v, ks::exact_variance(state, povm, can, obs) + 1e-10);
        EXPECT_LE(v, ks::exact_variance(state, povm, random_joint_duals(rng), obs) + 1e-10);
    }
}

TEST(Estimation, SampledEstimateIsConsistent) {
    const auto povm = pauli6_povm(2);
    const ks::State bell = ks::bell_state();
    const auto duals = ks::canonical_global_duals(povm, ks::Partition::singletons(2));
    const ks::PauliObservable zz(2, {{1.0, "ZZ"}});
    const auto ds = ks::sample_shots(bell, povm, 200000, 3);
    const auto r = ks::estimate(ds, duals, zz);
    EXPECT_NEAR(r.mean, 1.0, 5 * r.std_error);
    EXPECT_NEAR(r.sample_variance, 8.0, 0.2);
    EXPECT_EQ(r.provenance, "canonical");
    ks::EstimateOptions one;
    one.workers = 1;
    ks::EstimateOptions many;
    many.workers = 4;
    const auto a = ks::estimate(ds, duals, zz, one);
    const auto b = ks::estimate(ds, duals, zz, many);
    EXPECT_EQ(a.mean, b.mean);
    EXPECT_EQ(a.sample_variance, b.sample_variance);

    // A shot of outcomes (0, 0) is ZZ = +1 in both bases: omega = 3 * 3.
    const std::uint8_t shot[2] = {0, 0};
    EXPECT_NEAR(ks::omega(shot, duals, zz), 9.0, 1e-12);
}

TEST(Estimation, IdentityComponentShiftsEveryOmega) {
    const auto povm = pauli6_povm(2);
    const auto duals = ks::canonical_global_duals(povm, ks::Partition::singletons(2));
    const ks::PauliObservable base(2, {{0.4, "XY"}, {-1.1, "ZI"}});
    const ks::PauliObservable shifted(2, {{0.4, "XY"}, {-1.1, "ZI"}, {2.5, "II"}});
    const auto ds = ks::sample_shots(ks::product_state("+0"), povm, 5000, 4);
    const ks::CoefficientCache cb(duals, base), cs(duals, shifted);
    for (std::uint64_t s = 0; s < 50; ++s) {
        EXPECT_NEAR(ks::omega(ds.shot(s), cs, 6), ks::omega(ds.shot(s), cb, 6) + 2.5, 1e-12);
    }
    const auto rb = ks::estimate(ds, duals, base);
    const auto rs = ks::estimate(ds, duals, shifted);
    EXPECT_NEAR(rs.mean, rb.mean + 2.5, 1e-12);
    EXPECT_NEAR(rs.sample_variance, rb.sample_variance, 1e-9);
    EXPECT_EQ(ks::apply_identity_mode(shifted, ks::IdentityMode::Exclude).terms().size(), 2U);
}

TEST(Estimation, RmseIsDeterministicAndScales) {
    const auto povm = pauli6_povm(2);
    const ks::State bell = ks::bell_state();
    const auto duals = ks::canonical_global_duals(povm, ks::Partition::singletons(2));
    const ks::PauliObservable zz(2, {{1.0, "ZZ"}});
    ks::RmseOptions one;
    one.workers = 1;
    ks::RmseOptions many;
    many.workers = 3;
    const auto a = ks::rmse_experiment(bell, povm, duals, zz, 400, 200, 9, one);
    const auto b = ks::rmse_experiment(bell, povm, duals, zz, 400, 200, 9, many);
    EXPECT_EQ(a.estimates, b.estimates);
    EXPECT_NEAR(a.truth, 1.0, 1e-12);
    const double predicted = std::sqrt(8.0 / 200.0);
    EXPECT_NEAR(a.rmse / predicted, 1.0, 0.15);
    EXPECT_THROW(ks::rmse_experiment(bell, povm, duals, zz, 0, 10, 1), ks::ValidationError);
}

TEST(Io, HamiltonianParsing) {
    std::istringstream in("# comment\n\n-0.5 ZZ\n 0.25\tXI  \n1e-1 II\n");
    const auto h = ks::read_hamiltonian(in);
    ASSERT_EQ(h.terms().size(), 3U);
    EXPECT_EQ(h.terms()[1].word, "XI");
    EXPECT_DOUBLE_EQ(h.terms()[2].coefficient, 0.1);
    std::ostringstream out;
    ks::write_hamiltonian(out, h);
    std::istringstream back(out.str());
    const auto h2 = ks::read_hamiltonian(back);
    for (std::size_t t = 0; t < 3; ++t) {
        EXPECT_EQ(h2.terms()[t].word, h.terms()[t].word);
        EXPECT_EQ(h2.terms()[t].coefficient, h.terms()[t].coefficient);
    }
    for (const std::string bad : {"1.0 ZZ\n2.0 ZZZ\n", "1.0 ZQ\n", "abc ZZ\n", "1.0\n", "# only comments\n"}) {
        std::istringstream s(bad);
        EXPECT_THROW(ks::read_hamiltonian(s), ks::ParseError) << bad;
    }
    std::istringstream lined("1.0 ZZ\n# c\n2.0 Z\n");
    try {
        ks::read_hamiltonian(lined, "h.txt");
        FAIL();
    } catch (const ks::ParseError &e) {
        EXPECT_NE(std::string(e.what()).find("h.txt:3"), std::string::npos) << e.what();
    }
}

TEST(Io, PartitionRoundTrip) {
    const ks::Partition p(5, {{0, 3}, {1, 2}, {4}});
    std::ostringstream out;
    ks::write_partition(out, p);
    std::istringstream in(out.str());
    EXPECT_EQ(ks::read_partition(in), p);
    std::istringstream alt("# groups\n(0, 3)\n1,2\n4\n");
    EXPECT_EQ(ks::read_partition(alt), p);
    std::istringstream bad("0 1\n1 2\n");
    EXPECT_THROW(ks::read_partition(bad), ks::Error);
}

TEST(Io, DatasetRoundTripAndLayout) {
    const auto ds = ks::sample_shots(ks::ghz_state(3), pauli6_povm(3), 100, 42);
    std::ostringstream out;
    ks::write_dataset(out, ds);
    const std::string bytes = out.str();
    ASSERT_EQ(bytes.size(), ks::kDatasetHeaderBytes + 300);
    EXPECT_EQ(bytes.substr(0, 4), "ICSD");
    EXPECT_EQ(static_cast<unsigned char>(bytes[4]), 1);
    EXPECT_EQ(static_cast<unsigned char>(bytes[6]), 3);
    EXPECT_EQ(static_cast<unsigned char>(bytes[8]), 6);
    EXPECT_EQ(static_cast<unsigned char>(bytes[10]), 100);
    EXPECT_EQ(static_cast<unsigned char>(bytes[18]), 42);
    std::istringstream in(bytes);
    EXPECT_EQ(ks::read_dataset(in), ds);

    std::istringstream truncated(bytes.substr(0, bytes.size() - 1));
    EXPECT_THROW(ks::read_dataset(truncated), ks::ParseError);
    std::string corrupt = bytes;
    corrupt[0] = 'X';
    std::istringstream magic(corrupt);
    EXPECT_THROW(ks::read_dataset(magic), ks::ParseError);
    std::string badidx = bytes;
    badidx.back() = 9;
    std::istringstream idx(badidx);
    EXPECT_THROW(ks::read_dataset(idx), ks::Error);
}

TEST(Io, DualsAndStatesRoundTrip) {
    const auto povm = pauli6_povm(3);
    const ks::State state = ks::ghz_state(3);
    const auto duals = ks::local_optimal_duals(state, povm, ks::Partition(3, {{0, 2}, {1}}));
    std::ostringstream out;
    ks::write_duals(out, duals);
    std::istringstream in(out.str());
    EXPECT_EQ(ks::read_duals(in), duals);

    const auto blocks = ks::grouped_product_state(state, duals.partition());
    std::ostringstream sout;
    ks::write_states(sout, blocks.partition(), blocks.blocks());
    std::istringstream sin(sout.str());
    const auto back = ks::read_states(sin);
    EXPECT_EQ(back.partition(), blocks.partition());
    for (std::size_t g = 0; g < 2; ++g) EXPECT_EQ(back.blocks()[g].matrix(), blocks.blocks()[g].matrix());
}

TEST(Io, RunConfigHashIsStable) {
    ks::RunConfig a, b;
    EXPECT_EQ(a.hash(), b.hash());
    EXPECT_EQ(a.effective_s_bias(), 1296.0);
    b.seed = 2;
    EXPECT_NE(a.hash(), b.hash());
    EXPECT_EQ(ks::hex64(ks::fnv1a("")), "cbf29ce484222325");
    std::ostringstream out;
    ks::CsvWriter csv(out);
    csv.row("a,b", 1, 0.5);
    EXPECT_EQ(out.str(), "\"a,b\",1,0.5\n");
}

TEST(Io, StateSpecs) {
    EXPECT_EQ(ks::state_qubits(ks::parse_state_spec("bell")), 2);
    EXPECT_EQ(ks::state_qubits(ks::parse_state_spec("ghz-5")), 5);
    EXPECT_EQ(ks::state_qubits(ks::parse_state_spec("bell-pairs-3")), 6);
    EXPECT_EQ(ks::state_qubits(ks::parse_state_spec("maxmixed-4")), 4);
    EXPECT_EQ(ks::state_qubits(ks::parse_state_spec("product:0+r")), 3);
    EXPECT_EQ(ks::state_qubits(ks::parse_state_spec("mixed-toy:0.3")), 2);
    EXPECT_THROW(ks::parse_state_spec("pure-toy:2"), ks::ValidationError);
    EXPECT_THROW(ks::parse_state_spec("banana"), ks::Error);
}
