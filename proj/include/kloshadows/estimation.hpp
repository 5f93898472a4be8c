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
 * @file estimation.hpp
 * Shot-wise estimator values omega_m = Tr[D_m O] for product duals, sample
 * means with population variance, exact single-shot moments and RMSE runs.
 */

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <variant>
#include <vector>

#include "kloshadows/duals.hpp"
#include "kloshadows/parallel.hpp"
#include "kloshadows/pauli.hpp"
#include "kloshadows/rng.hpp"
#include "kloshadows/sampling.hpp"
#include "kloshadows/states.hpp"

namespace kloshadows {

enum class IdentityMode { Include, Exclude };

inline PauliObservable apply_identity_mode(const PauliObservable &obs, IdentityMode mode) {
    return mode == IdentityMode::Include ? obs : obs.without_identity();
}

/**
 * Per group, the distinct Pauli substrings occurring in the observable and
 * their trace vectors Tr[D^G_m P_G] over the group outcomes.
 */
class CoefficientCache {
   public:
    CoefficientCache(const GlobalDuals &duals, const PauliObservable &obs) {
        if (duals.qubits() != obs.qubits()) throw DimensionError("duals and observable qubit counts differ");
        const auto &groups = duals.partition().groups();
        groups_ = groups;
        substrings_.resize(groups.size());
        vectors_.resize(groups.size());
        std::vector<std::map<std::string, std::size_t>> lookup(groups.size());
        for (const auto &term : obs.terms()) {
            coefficients_.push_back(term.coefficient);
            std::vector<std::size_t> idx(groups.size());
            for (std::size_t g = 0; g < groups.size(); ++g) {
                std::string sub;
                for (int q : groups[g]) sub.push_back(term.word[static_cast<std::size_t>(q)]);
                auto [it, inserted] = lookup[g].try_emplace(sub, substrings_[g].size());
                if (inserted) {
                    substrings_[g].push_back(sub);
                    const auto &frame = duals.frame(g);
                    std::vector<double> v(frame.size());
                    for (std::size_t m = 0; m < frame.size(); ++m) v[m] = trace_with_pauli(frame.dual(m), sub);
                    vectors_[g].push_back(std::move(v));
                }
                idx[g] = it->second;
            }
            term_index_.push_back(std::move(idx));
        }
    }

    std::size_t groups() const { return groups_.size(); }
    std::size_t terms() const { return coefficients_.size(); }
    const QubitList &group(std::size_t g) const { return groups_[g]; }
    double coefficient(std::size_t t) const { return coefficients_[t]; }
    std::size_t substring_index(std::size_t t, std::size_t g) const { return term_index_[t][g]; }
    const std::vector<std::string> &substrings(std::size_t g) const { return substrings_[g]; }
    const std::vector<double> &vector(std::size_t g, std::size_t s) const { return vectors_[g][s]; }

    std::size_t entries() const {
        std::size_t n = 0;
        for (const auto &group : vectors_) {
            for (const auto &v : group) n += v.size();
        }
        return n;
    }

   private:
    std::vector<QubitList> groups_;
    std::vector<double> coefficients_;
    std::vector<std::vector<std::size_t>> term_index_;
    std::vector<std::vector<std::string>> substrings_;
    std::vector<std::vector<std::vector<double>>> vectors_;
};

namespace detail {

inline double omega_cached(const CoefficientCache &cache, std::span<const std::uint8_t> shot, int d,
                           std::vector<std::size_t> &flat) {
    flat.resize(cache.groups());
    for (std::size_t g = 0; g < cache.groups(); ++g) flat[g] = flat_group_index(shot, cache.group(g), d);
    double total = 0.0;
    for (std::size_t t = 0; t < cache.terms(); ++t) {
        double value = cache.coefficient(t);
        for (std::size_t g = 0; g < cache.groups(); ++g) value *= cache.vector(g, cache.substring_index(t, g))[flat[g]];
        total += value;
    }
    return total;
}

}  // namespace detail

inline double omega(std::span<const std::uint8_t> shot, const CoefficientCache &cache, int outcomes_per_qubit) {
    std::vector<std::size_t> flat;
    return detail::omega_cached(cache, shot, outcomes_per_qubit, flat);
}

inline double omega(std::span<const std::uint8_t> shot, const GlobalDuals &duals, const PauliObservable &obs,
                    int outcomes_per_qubit = 6) {
    if (static_cast<int>(shot.size()) != duals.qubits()) throw DimensionError("omega: shot length mismatch");
    for (auto m : shot) {
        if (m >= outcomes_per_qubit) throw IndexError("omega: outcome index out of range");
    }
    return omega(shot, CoefficientCache(duals, obs), outcomes_per_qubit);
}

struct EstimateReport {
    double mean = 0.0;
    double sample_variance = 0.0;
    double std_error = 0.0;
    std::uint64_t shots = 0;
    std::string provenance;
};

struct EstimateOptions {
    unsigned workers = 0;
};

/** Mean and population variance of omega over the shots of a dataset. */
inline EstimateReport estimate(const Dataset &ds, const GlobalDuals &duals, const PauliObservable &obs,
                               const EstimateOptions &options = {}) {
    if (ds.shots() == 0) throw ValidationError("estimate: empty dataset");
    if (ds.qubits() != duals.qubits()) throw DimensionError("estimate: dataset and duals qubit counts differ");
    for (const auto &f : duals.frames()) {
        std::size_t expected = 1;
        for (std::size_t j = 0; j < f.group().size(); ++j) expected *= static_cast<std::size_t>(ds.outcomes_per_qubit());
        if (f.size() != expected) throw DimensionError("estimate: dual count does not match the dataset alphabet");
    }
    const CoefficientCache cache(duals, obs);
    const auto shots = static_cast<std::size_t>(ds.shots());
    std::vector<double> w(shots), w2(shots);
    const int d = ds.outcomes_per_qubit();
    parallel_for(shots, options.workers, [&](std::size_t begin, std::size_t end) {
        std::vector<std::size_t> flat;
        for (std::size_t s = begin; s < end; ++s) {
            w[s] = detail::omega_cached(cache, ds.shot(s), d, flat);
            w2[s] = w[s] * w[s];
        }
    });
    EstimateReport r;
    r.shots = ds.shots();
    r.mean = pairwise_sum(w) / static_cast<double>(shots);
    r.sample_variance = std::max(0.0, pairwise_sum(w2) / static_cast<double>(shots) - r.mean * r.mean);
    r.std_error = std::sqrt(r.sample_variance / static_cast<double>(shots));
    r.provenance = duals.provenance();
    return r;
}

struct ExactMoments {
    double mean = 0.0;           ///< E[omega]
    double second_moment = 0.0;  ///< E[omega^2]
    double variance() const { return second_moment - mean * mean; }
};

struct ExactVarianceOptions {
    std::size_t max_term_pairs = 1000000;
    DenseLimits limits{};
    unsigned workers = 0;
};

namespace detail {

inline std::pair<std::size_t, std::size_t> ordered_pair(std::size_t a, std::size_t b) {
    return a <= b ? std::pair{a, b} : std::pair{b, a};
}

/** Evaluates Tr[rho (x)_G A_G] for operators acting on the duals' groups. */
class ProductTraceEvaluator {
   public:
    ProductTraceEvaluator(const State &state, const Partition &partition, const DenseLimits &limits)
        : partition_(partition) {
        if (const auto *bp = std::get_if<BlockProductState>(&state); bp && bp->partition() == partition) {
            blocks_ = bp->blocks();
        } else if (const auto *pure = std::get_if<PureState>(&state)) {
            if (pure->qubits() > limits.statevector_qubits) throw CapacityError("state exceeds the statevector cap");
            psi_ = pure->amplitudes();
        } else {
            rho_ = to_density(state, limits.density_qubits).matrix();
        }
    }

    double operator()(std::span<const Matrix *const> ops) const {
        const auto &groups = partition_.groups();
        if (!blocks_.empty()) {
            double out = 1.0;
            for (std::size_t g = 0; g < groups.size(); ++g) out *= trace_product_real(*ops[g], blocks_[g].matrix());
            return out;
        }
        if (psi_) {
            Vector phi = *psi_;
            for (std::size_t g = 0; g < groups.size(); ++g) apply_on_qubits(*ops[g], groups[g], phi);
            return psi_->dot(phi).real();
        }
        Matrix x = *rho_;
        for (std::size_t g = 0; g < groups.size(); ++g) apply_on_qubits(*ops[g], groups[g], x);
        return x.trace().real();
    }

   private:
    Partition partition_;
    std::vector<DensityMatrix> blocks_;
    std::optional<Vector> psi_;
    std::optional<Matrix> rho_;
};

}  // namespace detail

/**
 * Exact E[omega] and E[omega^2] under the Born distribution of `state`,
 * without enumerating the joint outcomes: for a term pair (P, Q) and group G,
 * A^G_{PQ} = sum_m Pi^G_m Tr[D^G_m P_G] Tr[D^G_m Q_G], and
 * E[omega^2] = sum_{P,Q} c_P c_Q Tr[rho (x)_G A^G_{PQ}].
 */
inline ExactMoments exact_moments(const State &state, const ProductPovm &povm, const GlobalDuals &duals,
                                  const PauliObservable &obs, const ExactVarianceOptions &options = {}) {
    const int n = state_qubits(state);
    if (n != duals.qubits() || n != obs.qubits() || n != povm.qubits()) {
        throw DimensionError("exact_moments: qubit counts differ");
    }
    const std::size_t terms = obs.terms().size();
    if (terms * terms > options.max_term_pairs) {
        throw CapacityError("term-pair count " + std::to_string(terms * terms) + " exceeds the cap");
    }
    const CoefficientCache cache(duals, obs);
    const auto &groups = duals.partition().groups();
    const std::size_t ng = groups.size();

    std::vector<Matrix> stacked(ng);
    for (std::size_t g = 0; g < ng; ++g) stacked[g] = detail::stacked_effects(group_effects(povm, groups[g]));

    // Group operators: B_s = sum_m Pi_m a_s(m) and A_{s,t} = sum_m Pi_m a_s(m) a_t(m).
    const auto weighted_sum = [&](std::size_t g, const Eigen::VectorXd &c) {
        return devectorize(stacked[g] * c.cast<Complex>());
    };
    const auto as_vector = [](const std::vector<double> &v) {
        return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
    };
    std::vector<std::vector<Matrix>> single(ng);
    std::vector<std::map<std::pair<std::size_t, std::size_t>, Matrix>> pair_ops(ng);
    for (std::size_t g = 0; g < ng; ++g) {
        for (std::size_t s = 0; s < cache.substrings(g).size(); ++s) {
            single[g].push_back(weighted_sum(g, as_vector(cache.vector(g, s))));
        }
    }
    std::vector<std::tuple<std::size_t, std::size_t, std::size_t>> needed;
    for (std::size_t p = 0; p < terms; ++p) {
        for (std::size_t q = p; q < terms; ++q) {
            for (std::size_t g = 0; g < ng; ++g) {
                const auto key = detail::ordered_pair(cache.substring_index(p, g), cache.substring_index(q, g));
                if (pair_ops[g].try_emplace(key, Matrix()).second) needed.emplace_back(g, key.first, key.second);
            }
        }
    }
    parallel_for(needed.size(), options.workers, [&](std::size_t begin, std::size_t end) {
        for (std::size_t j = begin; j < end; ++j) {
            const auto [g, s, t] = needed[j];
            const Eigen::VectorXd c = as_vector(cache.vector(g, s)).cwiseProduct(as_vector(cache.vector(g, t)));
            pair_ops[g].find({s, t})->second = weighted_sum(g, c);
        }
    });

    const detail::ProductTraceEvaluator trace(state, duals.partition(), options.limits);

    std::vector<double> first(terms);
    parallel_for(terms, options.workers, [&](std::size_t begin, std::size_t end) {
        std::vector<const Matrix *> ops(ng);
        for (std::size_t p = begin; p < end; ++p) {
            for (std::size_t g = 0; g < ng; ++g) ops[g] = &single[g][cache.substring_index(p, g)];
            first[p] = cache.coefficient(p) * trace(ops);
        }
    });

    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t p = 0; p < terms; ++p) {
        for (std::size_t q = p; q < terms; ++q) pairs.emplace_back(p, q);
    }
    std::vector<double> second(pairs.size());
    parallel_for(pairs.size(), options.workers, [&](std::size_t begin, std::size_t end) {
        std::vector<const Matrix *> ops(ng);
        for (std::size_t j = begin; j < end; ++j) {
            const auto [p, q] = pairs[j];
            for (std::size_t g = 0; g < ng; ++g) {
                const auto key = detail::ordered_pair(cache.substring_index(p, g), cache.substring_index(q, g));
                ops[g] = &pair_ops[g].find(key)->second;
            }
            const double factor = p == q ? 1.0 : 2.0;
            second[j] = factor * cache.coefficient(p) * cache.coefficient(q) * trace(ops);
        }
    });
    return {pairwise_sum(first), pairwise_sum(second)};
}

inline double exact_variance(const State &state, const ProductPovm &povm, const GlobalDuals &duals,
                             const PauliObservable &obs, const ExactVarianceOptions &options = {}) {
    return exact_moments(state, povm, duals, obs, options).variance();
}

struct RmseReport {
    double rmse = 0.0;
    double truth = 0.0;
    std::uint64_t repetitions = 0;
    std::uint64_t shots = 0;
    std::vector<double> estimates;
};

struct RmseOptions {
    unsigned workers = 0;
    DenseLimits limits{};
};

/**
 * Repeats sampling and estimation R times with seeds derive_seed(seed, r) and
 * returns sqrt(mean_r (estimate_r - truth)^2).
 */
inline RmseReport rmse_experiment(const State &state, const ProductPovm &povm, const GlobalDuals &duals,
                                  const PauliObservable &obs, std::uint64_t repetitions, std::uint64_t shots,
                                  std::uint64_t seed, double truth, const RmseOptions &options = {}) {
    if (repetitions == 0 || shots == 0) throw ValidationError("rmse_experiment: repetitions and shots must be positive");
    RmseReport out;
    out.truth = truth;
    out.repetitions = repetitions;
    out.shots = shots;
    out.estimates.assign(static_cast<std::size_t>(repetitions), 0.0);
    const CoefficientCache cache(duals, obs);
    SamplingOptions inner;
    inner.workers = 1;
    inner.limits = options.limits;
    parallel_for(static_cast<std::size_t>(repetitions), options.workers, [&](std::size_t begin, std::size_t end) {
        std::vector<std::size_t> flat;
        std::vector<double> w;
        for (std::size_t r = begin; r < end; ++r) {
            const Dataset ds = sample_shots(state, povm, shots, derive_seed(seed, r), inner);
            w.resize(static_cast<std::size_t>(shots));
            for (std::size_t s = 0; s < w.size(); ++s) {
                w[s] = detail::omega_cached(cache, ds.shot(s), ds.outcomes_per_qubit(), flat);
            }
            out.estimates[r] = pairwise_sum(w) / static_cast<double>(shots);
        }
    });
    std::vector<double> sq(out.estimates.size());
    for (std::size_t r = 0; r < sq.size(); ++r) sq[r] = (out.estimates[r] - truth) * (out.estimates[r] - truth);
    out.rmse = std::sqrt(pairwise_sum(sq) / static_cast<double>(sq.size()));
    return out;
}

inline RmseReport rmse_experiment(const State &state, const ProductPovm &povm, const GlobalDuals &duals,
                                  const PauliObservable &obs, std::uint64_t repetitions, std::uint64_t shots,
                                  std::uint64_t seed, const RmseOptions &options = {}) {
    return rmse_experiment(state, povm, duals, obs, repetitions, shots, seed, expectation(state, obs), options);
}

}  // namespace kloshadows
