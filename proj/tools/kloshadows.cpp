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

// Command-line front end: kloshadows <subcommand> [options]

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kloshadows.hpp"

namespace fs = std::filesystem;
using namespace kloshadows;

namespace {

struct Common {
    std::uint64_t seed = 1;
    unsigned workers = 0;
    std::string out;
};

/** Writes to the named file, or stdout for "" and "-". */
class Output {
   public:
    explicit Output(const std::string &path) {
        if (!path.empty() && path != "-") {
            file_ = std::make_unique<std::ofstream>(path);
            if (!*file_) throw ParseError("cannot write " + path);
        }
    }
    std::ostream &stream() { return file_ ? *file_ : std::cout; }

   private:
    std::unique_ptr<std::ofstream> file_;
};

TomographyBackend make_backend(const std::string &name, double s_bias, int k) {
    if (name == "bias") {
        double v = s_bias;
        if (v < 0.0) {
            v = 1.0;
            for (int j = 0; j < k; ++j) v *= 6.0;
        }
        return FrequencyBias{v};
    }
    if (name == "psd") return LinearInversionPsd{};
    if (name == "lad") return ConstrainedLad{};
    throw ValidationError("unknown backend '" + name + "'");
}

IdentityMode parse_identity(const std::string &mode) {
    if (mode == "include") return IdentityMode::Include;
    if (mode == "exclude") return IdentityMode::Exclude;
    throw ValidationError("identity mode must be include or exclude");
}

RunConfig config_from(const Common &c, std::uint64_t shots, int k, const std::string &partitioner,
                      const std::string &backend, double s_bias, double floor, const std::string &identity) {
    RunConfig rc;
    rc.seed = c.seed;
    rc.shots = shots;
    rc.k = k;
    rc.partitioner = partitioner;
    rc.backend = backend;
    rc.s_bias = s_bias;
    rc.floor = floor;
    rc.identity_mode = identity;
    return rc;
}

void add_common(CLI::App *cmd, Common &c, bool seed = true) {
    if (seed) cmd->add_option("--seed", c.seed, "RNG seed")->capture_default_str();
    cmd->add_option("--workers", c.workers, "Worker threads (0 = all cores)")->capture_default_str();
    cmd->add_option("-o,--out", c.out, "Output file (default stdout)");
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Observable estimation with k-locally optimal dual frames"};
    app.require_subcommand(1);
    Common common;

    // sample
    std::string state_spec;
    std::uint64_t shots = 100000;
    auto *sample = app.add_subcommand("sample", "Simulate Pauli-6 shots of a state into a dataset file");
    sample->add_option("--state", state_spec, "State spec (bell, ghz-N, product:01+-rl, bell-pairs-P, "
                                              "maxmixed-N, mixed-toy:q, pure-toy:q, ground-state-of:FILE)")
        ->required();
    sample->add_option("--shots", shots, "Number of shots")->capture_default_str();
    add_common(sample, common);

    // mi
    std::string data_path;
    auto *mi = app.add_subcommand("mi", "Pairwise mutual-information matrix as CSV");
    mi->add_option("--data", data_path, "Dataset file")->required()->check(CLI::ExistingFile);
    add_common(mi, common, false);

    // partition
    int k = 4;
    std::string method = "greedy";
    auto *part = app.add_subcommand("partition", "Group qubits by mutual information");
    part->add_option("--data", data_path, "Dataset file")->required()->check(CLI::ExistingFile);
    part->add_option("-k,--k", k, "Maximum group size")->capture_default_str();
    part->add_option("--method", method, "greedy, naive, node or edge")->capture_default_str();
    add_common(part, common, false);

    // tomo
    std::string partition_path, backend = "lad", states_out, csv_out;
    double s_bias = -1.0;
    auto *tomo = app.add_subcommand("tomo", "Reconstruct group states and report residuals");
    tomo->add_option("--data", data_path, "Dataset file")->required()->check(CLI::ExistingFile);
    tomo->add_option("--partition", partition_path, "Partition file (default: partition by --method)");
    tomo->add_option("-k,--k", k, "Maximum group size")->capture_default_str();
    tomo->add_option("--method", method, "Partitioner when no partition file is given")->capture_default_str();
    tomo->add_option("--backend", backend, "bias, psd or lad")->capture_default_str();
    tomo->add_option("--s-bias", s_bias, "Pseudo-counts for the bias backend (default 6^k)");
    tomo->add_option("--states-out", states_out, "Write reconstructed group states (psd, lad)");
    add_common(tomo, common, false);

    // duals
    std::string states_path;
    double floor = kDefaultProbabilityFloor;
    bool canonical = false;
    int qubits = 0;
    auto *duals_cmd = app.add_subcommand("duals", "Build and serialize dual frames");
    duals_cmd->add_option("--data", data_path, "Dataset file (k-LO pipeline)")->check(CLI::ExistingFile);
    duals_cmd->add_option("--states", states_path, "Group state file from 'tomo'")->check(CLI::ExistingFile);
    duals_cmd->add_flag("--canonical", canonical, "Canonical single-qubit duals");
    duals_cmd->add_option("--qubits", qubits, "Qubit count for --canonical");
    duals_cmd->add_option("--partition", partition_path, "Partition file");
    duals_cmd->add_option("-k,--k", k, "Maximum group size")->capture_default_str();
    duals_cmd->add_option("--method", method, "Partitioner")->capture_default_str();
    duals_cmd->add_option("--backend", backend, "bias, psd or lad")->capture_default_str();
    duals_cmd->add_option("--s-bias", s_bias, "Pseudo-counts for the bias backend (default 6^k)");
    duals_cmd->add_option("--floor", floor, "Probability floor")->capture_default_str();
    duals_cmd->add_option("-o,--out", common.out, "Output duals file")->required();
    duals_cmd->add_option("--workers", common.workers, "Worker threads");

    // estimate
    std::string duals_path, ham_path, identity = "include";
    auto *est = app.add_subcommand("estimate", "Estimate an observable from a dataset and duals");
    est->add_option("--data", data_path, "Dataset file")->required()->check(CLI::ExistingFile);
    est->add_option("--duals", duals_path, "Duals file")->required()->check(CLI::ExistingFile);
    est->add_option("--hamiltonian", ham_path, "Observable file")->required()->check(CLI::ExistingFile);
    est->add_option("--identity", identity, "include or exclude the identity term")->capture_default_str();
    add_common(est, common, false);

    // exact-variance
    auto *ev = app.add_subcommand("exact-variance", "Exact single-shot variance of an observable");
    ev->add_option("--state", state_spec, "State spec")->required();
    ev->add_option("--duals", duals_path, "Duals file (default canonical)")->check(CLI::ExistingFile);
    ev->add_option("--hamiltonian", ham_path, "Observable file")->required()->check(CLI::ExistingFile);
    ev->add_option("--identity", identity, "include or exclude")->capture_default_str();
    add_common(ev, common, false);

    // benchmark
    std::string rdm_mode = "exact";
    std::vector<int> ks{1, 2, 4};
    std::uint64_t bench_shots = 100000;
    auto *bench = app.add_subcommand("benchmark", "Variance table for canonical and k-LO duals on a ground state");
    bench->add_option("--hamiltonian", ham_path, "Hamiltonian file")->required()->check(CLI::ExistingFile);
    bench->add_option("--ks", ks, "Locality values")->capture_default_str();
    bench->add_option("--shots", bench_shots, "Shots used for partitioning and tomography")->capture_default_str();
    bench->add_option("--rdm", rdm_mode, "exact or tomo group states")->capture_default_str();
    bench->add_option("--backend", backend, "Backend for --rdm tomo")->capture_default_str();
    add_common(bench, common);

    // rmse
    std::uint64_t reps = 1000;
    auto *rmse = app.add_subcommand("rmse", "Root-mean-square error over independent repetitions");
    rmse->add_option("--state", state_spec, "State spec")->required();
    rmse->add_option("--hamiltonian", ham_path, "Observable file")->required()->check(CLI::ExistingFile);
    rmse->add_option("--duals", duals_path, "Duals file (default canonical)")->check(CLI::ExistingFile);
    rmse->add_option("--reps", reps, "Repetitions R")->capture_default_str();
    rmse->add_option("--shots", shots, "Shots per repetition")->capture_default_str();
    rmse->add_option("--identity", identity, "include or exclude")->capture_default_str();
    add_common(rmse, common);

    // toy
    std::string family = "mixed";
    std::vector<double> qs;
    int steps = 21;
    auto *toy = app.add_subcommand("toy", "Two-qubit toy sweep of Var[ZZ] and state MSE");
    toy->add_option("--family", family, "mixed or pure")->capture_default_str();
    toy->add_option("--q", qs, "Explicit q values (default: uniform grid)");
    toy->add_option("--steps", steps, "Grid points on [0, 1]")->capture_default_str();
    add_common(toy, common, false);

    CLI11_PARSE(app, argc, argv);

    try {
        std::cout << std::setprecision(12);
        if (*sample) {
            const State state = parse_state_spec(state_spec);
            const auto povm = ProductPovm::uniform(pauli6(), state_qubits(state));
            SamplingOptions so;
            so.workers = common.workers;
            const Dataset ds = sample_shots(state, povm, shots, common.seed, so);
            if (common.out.empty() || common.out == "-") throw ValidationError("sample needs --out");
            save_dataset(common.out, ds);
            std::cerr << "wrote " << ds.shots() << " shots of " << ds.qubits() << " qubits to " << common.out << "\n";
        } else if (*mi) {
            const Dataset ds = load_dataset(data_path);
            const MIGraph g = mi_graph(ds, common.workers);
            Output out(common.out);
            auto &os = out.stream();
            os << std::setprecision(12);
            for (int i = 0; i < g.qubits(); ++i) {
                for (int j = 0; j < g.qubits(); ++j) os << (j ? "," : "") << g.weight(i, j);
                os << '\n';
            }
        } else if (*part) {
            const Dataset ds = load_dataset(data_path);
            const Partition p = make_partition(ds, k, parse_partitioner(method), common.workers);
            Output out(common.out);
            write_partition(out.stream(), p);
            std::cerr << "modularity " << modularity(mi_graph(ds, common.workers), p) << "\n";
        } else if (*tomo) {
            const Dataset ds = load_dataset(data_path);
            const auto povm = ProductPovm::uniform(pauli6(), ds.qubits());
            KloOptions o;
            o.k = k;
            o.backend = make_backend(backend, s_bias, k);
            o.partitioner = parse_partitioner(method);
            o.workers = common.workers;
            if (!partition_path.empty()) o.partition = load_partition(partition_path);
            const auto result = klo_pipeline(ds, povm, o);
            const auto rc = config_from(common, ds.shots(), k, method, backend, s_bias, floor, identity);
            Output out(common.out);
            CsvWriter csv(out.stream());
            csv.row("group", "backend", "residual", "iterations", "converged", "seed", "config_hash");
            std::vector<DensityMatrix> states;
            const auto &groups = result.duals.partition().groups();
            for (std::size_t g = 0; g < groups.size(); ++g) {
                const auto &rep = result.reconstructions[g].report;
                std::string name;
                for (int q : groups[g]) name += (name.empty() ? "" : " ") + std::to_string(q);
                csv.row(name, rep.backend, rep.residual, rep.iterations, rep.converged ? 1 : 0, ds.seed(), rc.hash());
                if (result.reconstructions[g].state) states.push_back(*result.reconstructions[g].state);
            }
            if (!states_out.empty()) {
                if (states.size() != groups.size()) throw ValidationError("the bias backend produces no states");
                save_states(states_out, result.duals.partition(), states);
            }
        } else if (*duals_cmd) {
            std::optional<GlobalDuals> duals;
            if (canonical) {
                if (qubits < 1) throw ValidationError("--canonical needs --qubits");
                const auto povm = ProductPovm::uniform(pauli6(), qubits);
                duals = canonical_global_duals(povm, Partition::singletons(qubits));
            } else if (!states_path.empty()) {
                const auto states = load_states(states_path);
                const auto povm = ProductPovm::uniform(pauli6(), states.qubits());
                duals = duals_from_states(states.partition(), states.blocks(), povm,
                                          std::to_string(states.partition().max_group_size()) + "-LO(states)", floor);
            } else if (!data_path.empty()) {
                const Dataset ds = load_dataset(data_path);
                const auto povm = ProductPovm::uniform(pauli6(), ds.qubits());
                KloOptions o;
                o.k = k;
                o.backend = make_backend(backend, s_bias, k);
                o.partitioner = parse_partitioner(method);
                o.floor = floor;
                o.workers = common.workers;
                if (!partition_path.empty()) o.partition = load_partition(partition_path);
                duals = klo_duals(ds, povm, o);
            } else {
                throw ValidationError("duals needs --data, --states or --canonical");
            }
            save_duals(common.out, *duals);
            std::cerr << "wrote " << duals->frames().size() << " frames (" << duals->provenance() << ") to "
                      << common.out << "\n";
        } else if (*est) {
            const Dataset ds = load_dataset(data_path);
            const GlobalDuals duals = load_duals(duals_path);
            validate_duals(duals, ProductPovm::uniform(pauli6(), ds.qubits()));
            const auto obs = apply_identity_mode(read_hamiltonian(fs::path(ham_path)), parse_identity(identity));
            EstimateOptions eo;
            eo.workers = common.workers;
            const auto r = estimate(ds, duals, obs, eo);
            RunConfig rc;
            rc.seed = ds.seed();
            rc.shots = ds.shots();
            rc.identity_mode = identity;
            Output out(common.out);
            CsvWriter csv(out.stream());
            csv.row("observable", "provenance", "mean", "sample_variance", "std_error", "shots", "seed", "config_hash");
            csv.row(fs::path(ham_path).filename().string(), r.provenance, r.mean, r.sample_variance, r.std_error,
                    r.shots, ds.seed(), rc.hash());
        } else if (*ev) {
            const State state = parse_state_spec(state_spec);
            const int n = state_qubits(state);
            const auto povm = ProductPovm::uniform(pauli6(), n);
            const GlobalDuals duals = duals_path.empty() ? canonical_global_duals(povm, Partition::singletons(n))
                                                         : load_duals(duals_path);
            validate_duals(duals, povm);
            const auto obs = apply_identity_mode(read_hamiltonian(fs::path(ham_path)), parse_identity(identity));
            ExactVarianceOptions eo;
            eo.workers = common.workers;
            Output out(common.out);
            out.stream() << std::setprecision(12) << exact_variance(state, povm, duals, obs, eo) << '\n';
        } else if (*bench) {
            const auto h = read_hamiltonian(fs::path(ham_path));
            const int n = h.qubits();
            const auto gs = ground_state(h);
            const State state = gs.state;
            const auto povm = ProductPovm::uniform(pauli6(), n);
            SamplingOptions so;
            so.workers = common.workers;
            const Dataset ds = sample_shots(state, povm, bench_shots, common.seed, so);
            const auto rc = config_from(common, bench_shots, 0, "greedy", rdm_mode == "exact" ? "exact" : backend,
                                        -1.0, floor, "both");
            Output out(common.out);
            CsvWriter csv(out.stream());
            csv.row("method", "partition", "variance_with_identity", "variance_without_identity", "energy", "seed",
                    "config_hash");
            const auto emit = [&](const std::string &name, const GlobalDuals &duals) {
                ExactVarianceOptions eo;
                eo.workers = common.workers;
                csv.row(name, duals.partition().to_string(), exact_variance(state, povm, duals, h, eo),
                        exact_variance(state, povm, duals, h.without_identity(), eo), gs.energy, common.seed, rc.hash());
            };
            emit("canonical", canonical_global_duals(povm, Partition::singletons(n)));
            for (int kk : ks) {
                const Partition p = greedy_partition(ds, std::min(kk, n), common.workers);
                if (rdm_mode == "exact") {
                    emit(std::to_string(kk) + "-LO", local_optimal_duals(state, povm, p, floor, common.workers));
                } else if (rdm_mode == "tomo") {
                    KloOptions o;
                    o.k = kk;
                    o.backend = make_backend(backend, -1.0, kk);
                    o.partition = p;
                    o.workers = common.workers;
                    emit(std::to_string(kk) + "-LO", klo_duals(ds, povm, o));
                } else {
                    throw ValidationError("--rdm must be exact or tomo");
                }
            }
        } else if (*rmse) {
            const State state = parse_state_spec(state_spec);
            const int n = state_qubits(state);
            const auto povm = ProductPovm::uniform(pauli6(), n);
            const GlobalDuals duals = duals_path.empty() ? canonical_global_duals(povm, Partition::singletons(n))
                                                         : load_duals(duals_path);
            validate_duals(duals, povm);
            const auto obs = apply_identity_mode(read_hamiltonian(fs::path(ham_path)), parse_identity(identity));
            RmseOptions ro;
            ro.workers = common.workers;
            const auto r = rmse_experiment(state, povm, duals, obs, reps, shots, common.seed, ro);
            ExactVarianceOptions eo;
            eo.workers = common.workers;
            const double var = exact_variance(state, povm, duals, obs, eo);
            const auto rc = config_from(common, shots, 0, "", "", -1.0, floor, identity);
            Output out(common.out);
            CsvWriter csv(out.stream());
            csv.row("provenance", "repetitions", "shots", "rmse", "predicted", "ratio", "seed", "config_hash");
            const double predicted = std::sqrt(var / static_cast<double>(shots));
            csv.row(duals.provenance(), reps, shots, r.rmse, predicted, r.rmse / predicted, common.seed, rc.hash());
        } else if (*toy) {
            const auto fam = parse_toy_family(family);
            if (qs.empty()) {
                if (steps < 2) throw ValidationError("--steps must be at least 2");
                for (int j = 0; j < steps; ++j) qs.push_back(static_cast<double>(j) / (steps - 1));
            }
            RunConfig rc;
            rc.seed = 0;
            rc.shots = 0;
            rc.partitioner = "toy-" + family;
            Output out(common.out);
            CsvWriter csv(out.stream());
            csv.row("family", "q", "var_canonical", "var_1lo", "var_optimized_1local", "var_2lo", "mse_canonical",
                    "mse_1lo", "mse_optimized_1local", "mse_2lo", "sweeps", "seed", "config_hash");
            for (double q : qs) {
                const auto p = toy_point(fam, q);
                csv.row(family, q, p.variance[0], p.variance[1], p.variance[2], p.variance[3], p.mse[0], p.mse[1],
                        p.mse[2], p.mse[3], p.sweeps, rc.seed, rc.hash());
            }
        }
    } catch (const Error &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
