// Copyright 2026 The qmanizk Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Batch harness: instance generation, Monte-Carlo protocol runs with
// machine-readable reports, the invariant suites, and amplification sweeps.
// Reports go to stdout, logs to stderr; exit codes: 0 ok, 2 usage,
// 3 invariant failure.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "qmanizk/dual_mode.hpp"
#include "qmanizk/fiat_shamir.hpp"
#include "qmanizk/hamiltonian.hpp"
#include "qmanizk/lemma_suites.hpp"
#include "qmanizk/protocol_qsp.hpp"

namespace {

using namespace qmanizk;

constexpr int kUsageError = 2;
constexpr int kInvariantFailure = 3;

std::uint64_t pick_seed(const std::optional<std::uint64_t>& given) {
    if (given.has_value()) return *given;
    std::random_device rd;
    std::uint64_t seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    std::cerr << "seed: " << seed << " (pass --seed " << seed << " to replay)\n";
    return seed;
}

ham::ToyCircuit parse_circuit(const std::string& text, int witness_qubits) {
    ham::ToyCircuit circ;
    circ.num_witness_qubits = witness_qubits;
    std::istringstream lines(text);
    std::string tok;
    std::string gate;
    std::vector<std::string> parts;
    for (std::string piece; std::getline(lines, piece, ';');) {
        std::istringstream ss(piece);
        std::string name;
        if (!(ss >> name)) continue;
        ham::GateOp op;
        int a = -1, b = -1;
        if (name == "CNOT" || name == "cnot") {
            if (!(ss >> a >> b)) throw std::invalid_argument("circuit: CNOT needs control and target");
            op.kind = ham::GateOp::Kind::CNOT;
            op.control = a;
            op.target = b;
        } else {
            if (!(ss >> a)) throw std::invalid_argument("circuit: gate '" + name + "' needs a target");
            op.target = a;
            if (name == "H" || name == "h") op.kind = ham::GateOp::Kind::H;
            else if (name == "T" || name == "t") op.kind = ham::GateOp::Kind::T;
            else if (name == "X" || name == "x") op.kind = ham::GateOp::Kind::X;
            else if (name == "Z" || name == "z") op.kind = ham::GateOp::Kind::Z;
            else throw std::invalid_argument("circuit: unknown gate '" + name + "'");
        }
        circ.num_qubits = std::max({circ.num_qubits, op.target + 1, op.control + 1});
        circ.gates.push_back(op);
    }
    circ.num_qubits = std::max(circ.num_qubits, witness_qubits);
    circ.validate();
    return circ;
}

struct ProtocolRunner {
    std::function<bool(Rng&)> run;
    std::optional<double> analytic_energy;  // energy of the effective teleported state
    bool diluted = true;                    // acceptance law divides by N'
};

ProtocolRunner make_runner(const std::string& protocol, const ham::Instance& inst,
                           const std::string& cheat, const std::string& dm_mode) {
    const int n = inst.num_qubits();
    ProtocolRunner r;
    enum class Cheat { honest, ground, random };
    Cheat c = cheat.empty() || cheat == "honest" ? Cheat::honest
              : cheat == "ground"                ? Cheat::ground
                                                 : Cheat::random;
    if (!cheat.empty() && cheat != "honest" && cheat != "ground" && cheat != "random") {
        throw CLI::ValidationError("--cheat must be one of honest|ground|random");
    }
    if (c == Cheat::honest && !inst.witness.has_value()) {
        throw CLI::ValidationError("honest runs need an instance with a stored witness");
    }

    if (n <= 10) {
        switch (c) {
            case Cheat::honest: r.analytic_energy = ham::energy(*inst.witness, inst.hamiltonian); break;
            case Cheat::ground: r.analytic_energy = ham::ground_state(inst.hamiltonian).first; break;
            case Cheat::random: r.analytic_energy = 0.5; break;
        }
    }

    if (protocol == "qsp") {
        r.run = [inst, c](Rng& rng) {
            auto keys = qsp::setup(inst.num_qubits(), rng);
            qsp::QspProof proof;
            switch (c) {
                case Cheat::honest: proof = qsp::prove(keys.proving, inst, rng); break;
                case Cheat::ground: proof = qsp::cheat_prove_optimal(keys.proving, inst, rng); break;
                case Cheat::random: proof = qsp::random_proof(inst.num_qubits(), rng); break;
            }
            return qsp::verify(keys.verification, inst, proof, rng).first;
        };
    } else if (protocol == "qsp-prime") {
        r.run = [inst, c](Rng& rng) {
            auto keys = qsp::nizk_prime_setup(inst.num_qubits(), rng);
            qsp::QspProof proof;
            switch (c) {
                case Cheat::honest: proof = qsp::nizk_prime_prove(keys.rho_p, inst, rng); break;
                case Cheat::ground:
                    proof = qsp::teleport_against(ham::ground_state(inst.hamiltonian).second, keys.rho_p, rng);
                    break;
                case Cheat::random: proof = qsp::random_proof(inst.num_qubits(), rng); break;
            }
            return qsp::nizk_prime_verify(keys.verification, inst, proof, rng);
        };
    } else if (protocol == "nip") {
        ham::paired_xxzz_form(inst.hamiltonian);  // shape check up front
        r.diluted = false;
        r.run = [inst, c](Rng& rng) {
            auto keys = qsp::nip_setup(inst.num_qubits(), rng);
            qsp::QspProof proof;
            switch (c) {
                case Cheat::honest: proof = qsp::nip_prove(keys.rho_p, inst, rng); break;
                case Cheat::ground: proof = qsp::nip_cheat_ground(keys.rho_p, inst, rng); break;
                case Cheat::random: proof = qsp::random_proof(inst.num_qubits(), rng); break;
            }
            return qsp::nip_verify(keys, inst, proof, rng);
        };
    } else if (protocol == "sigma" || protocol == "fs") {
        const bool interactive = protocol == "sigma";
        r.run = [inst, c, interactive](Rng& rng) {
            fs::ProgrammableOracle ro(rand_u64(rng));
            auto keys = fs::sigma_preprocess(inst.num_qubits(), rng);
            QuantumState src = c == Cheat::honest ? *inst.witness
                               : c == Cheat::ground
                                   ? ham::ground_state(inst.hamiltonian).second
                                   : QuantumState(inst.num_qubits());
            if (interactive) {
                auto [msg1, st] = fs::sigma_prove1_with_state(src, keys.rho_p, ro, rng);
                if (c == Cheat::random) {
                    st.xz = qsp::random_proof(inst.num_qubits(), rng);
                    msg1.coms.clear();
                    st.rand.clear();
                    for (std::size_t j = 0; j < st.xz.x.size(); ++j) {
                        auto com = fs::commit(ro, fs::encode_xz(st.xz.x[j], st.xz.z[j]), rng);
                        msg1.coms.push_back(com.com);
                        st.rand.push_back(com.d.randomness);
                    }
                }
                auto s = fs::sigma_verify1(inst.num_qubits(), rng);
                auto msg3 = fs::sigma_prove2(st, s);
                return fs::sigma_verify2(keys.verification, inst, msg1, s, msg3, ro, rng);
            }
            Bytes id{'q', 'm'};
            fs::FsProof proof = fs::fs_prove_with_state(src, keys.rho_p, id, inst.num_qubits(), ro, rng);
            return fs::fs_verify(keys.verification, inst, id, proof, ro, rng);
        };
    } else if (protocol == "bell-fs") {
        if (c == Cheat::random) {
            throw CLI::ValidationError("bell-fs supports honest and ground runs");
        }
        r.run = [inst, c](Rng& rng) {
            fs::ProgrammableOracle ro(rand_u64(rng));
            auto session = fs::SharedBellSession::create(inst.num_qubits());
            Bytes id{'q', 'm'};
            ham::Instance src = inst;
            if (c == Cheat::ground) src.witness = ham::ground_state(inst.hamiltonian).second;
            fs::FsProof proof = fs::shared_bell_prove(session, src, id, ro, rng);
            auto kv = fs::shared_bell_measure_key(session, rng);
            return fs::fs_verify(kv, inst, id, proof, ro, rng);
        };
    } else if (protocol == "dual") {
        dm::DmMode mode = dm_mode == "hiding" ? dm::DmMode::hiding : dm::DmMode::binding;
        if (!dm_mode.empty() && dm_mode != "binding" && dm_mode != "hiding") {
            throw CLI::ValidationError("--mode must be binding or hiding");
        }
        r.run = [inst, c, mode](Rng& rng) {
            dm::DmeWorld world;
            auto crs = dm::dm_crsgen(world, mode, rng);
            auto [kp, kv] = dm::dm_preprocess(world, crs, inst.num_qubits(), rng);
            dm::DmProof proof;
            switch (c) {
                case Cheat::honest: proof = dm::dm_prove(world, crs, kp, inst, rng); break;
                case Cheat::ground:
                    proof = dm::dm_prove_with_state(world, crs, kp,
                                                    ham::ground_state(inst.hamiltonian).second, rng);
                    break;
                case Cheat::random: {
                    proof = dm::dm_prove_with_state(world, crs, kp, QuantumState(inst.num_qubits()), rng);
                    proof.x = rand_bits(rng, static_cast<std::size_t>(inst.num_qubits()));
                    proof.z = rand_bits(rng, static_cast<std::size_t>(inst.num_qubits()));
                    break;
                }
            }
            return dm::dm_verify(world, crs, kv, inst, proof, rng).accept;
        };
        if (c == Cheat::random) r.analytic_energy.reset();  // pads are inconsistent with x,z here
    } else {
        throw CLI::ValidationError("unknown protocol '" + protocol + "'");
    }
    return r;
}

int cmd_gen(const std::string& kind, int n, const std::string& circuit, int witness_qubits,
            const std::string& out) {
    ham::Instance inst;
    if (!circuit.empty()) {
        ham::ToyCircuit circ = parse_circuit(circuit, witness_qubits);
        auto h = ham::kitaev_hamiltonian(circ);
        QuantumState hist = ham::history_state(circ, QuantumState(witness_qubits));
        inst = ham::Instance{std::move(h), std::move(hist), true};
    } else {
        inst = ham::make_handcrafted_instance(kind, n);
    }
    ham::save_instance(inst, out);
    std::cerr << "wrote " << out << " (n = " << inst.num_qubits()
              << ", alpha = " << inst.hamiltonian.alpha << ", beta = " << inst.hamiltonian.beta
              << ", label = " << (inst.is_yes ? "yes" : "no") << ")\n";
    return 0;
}

int cmd_run(const std::string& protocol, const std::string& instance_path, std::uint64_t trials,
            std::optional<std::uint64_t> seed_opt, const std::string& cheat,
            const std::string& dm_mode) {
    auto t0 = std::chrono::steady_clock::now();
    ham::Instance inst = ham::load_instance(instance_path);
    std::uint64_t seed = pick_seed(seed_opt);
    ProtocolRunner runner = make_runner(protocol, inst, cheat, dm_mode);
    std::uint64_t accepts = run_trials(trials, seed, [&](Rng& rng, std::uint64_t) {
        return runner.run(rng);
    });
    double estimate = static_cast<double>(accepts) / static_cast<double>(trials);
    auto wall = std::chrono::duration_cast<std::chrono::milliseconds>(
                    std::chrono::steady_clock::now() - t0)
                    .count();
    nlohmann::ordered_json report;
    report["protocol"] = protocol;
    report["instance"] = instance_path;
    report["trials"] = trials;
    report["accepts"] = accepts;
    report["estimate"] = estimate;
    if (runner.analytic_energy.has_value()) {
        double denom = runner.diluted ? dilution_factor(inst.num_qubits()) : 1.0;
        report["analytic"] = 1.0 - *runner.analytic_energy / denom;
    } else {
        report["analytic"] = nullptr;
    }
    report["sigma"] = std::sqrt(estimate * (1.0 - estimate) / static_cast<double>(trials));
    report["seed"] = seed;
    report["wall_ms"] = wall;
    std::cout << report.dump() << "\n";
    return 0;
}

int cmd_lemmas(const std::string& suite, std::optional<std::uint64_t> seed_opt,
               const std::string& mutate) {
    std::uint64_t seed = pick_seed(seed_opt);
    suites::MutationFlags flags;
    if (mutate == "pad") flags.drop_pad_correction = true;
    else if (mutate == "ot-branch") flags.literal_ot_branches = true;
    else if (!mutate.empty()) throw CLI::ValidationError("--mutate must be pad or ot-branch");

    auto registry = suites::suite_registry();
    std::vector<std::string> names;
    if (suite == "all") {
        for (const auto& [name, fn] : registry) names.push_back(name);
    } else {
        if (registry.find(suite) == registry.end()) {
            throw CLI::ValidationError("unknown suite '" + suite + "'");
        }
        names.push_back(suite);
    }
    bool all_pass = true;
    for (const auto& name : names) {
        auto results = registry.at(name)(seed, flags);
        for (const auto& r : results) {
            all_pass = all_pass && r.pass;
            std::cout << (r.pass ? "PASS" : "FAIL") << "  " << r.name;
            if (!r.detail.empty()) std::cout << "  (" << r.detail << ")";
            std::cout << "\n";
        }
    }
    return all_pass ? 0 : kInvariantFailure;
}

int cmd_sweep(const std::string& protocol, const std::string& dir, const std::string& reps_csv,
              const std::string& out, std::uint64_t trials, std::optional<std::uint64_t> seed_opt) {
    std::vector<int> reps_list;
    {
        std::istringstream ss(reps_csv);
        for (std::string tok; std::getline(ss, tok, ',');) reps_list.push_back(std::stoi(tok));
    }
    std::vector<ham::Instance> yes, no;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.path().extension() != ".json") continue;
        ham::Instance inst = ham::load_instance(entry.path().string());
        (inst.is_yes ? yes : no).push_back(std::move(inst));
    }
    if (yes.empty() && no.empty()) {
        throw CLI::ValidationError("no instance files in '" + dir + "'");
    }
    std::uint64_t seed = pick_seed(seed_opt);

    std::ofstream csv(out);
    if (!csv) throw std::runtime_error("cannot open " + out);
    csv << "reps,completeness_err,soundness_err,hoeffding_bound\n";
    for (int reps : reps_list) {
        double comp_err = 0, sound_err = 0, bound = 1;
        std::uint64_t comp_total = 0, sound_total = 0, comp_fail = 0, sound_ok = 0;
        for (const ham::Instance& inst : yes) {
            ProtocolRunner runner = make_runner(protocol, inst, "honest", "");
            double denom = runner.diluted ? dilution_factor(inst.num_qubits()) : 1.0;
            qsp::Amplification amp{reps, 1.0 - inst.hamiltonian.alpha / denom,
                                   1.0 - inst.hamiltonian.beta / denom};
            bound = std::min(bound, amp.hoeffding_bound());
            std::uint64_t ok = run_trials(trials, seed ^ static_cast<std::uint64_t>(reps), [&](Rng& rng, std::uint64_t) {
                return qsp::amplified_accept(amp, runner.run, rng);
            });
            comp_fail += trials - ok;
            comp_total += trials;
        }
        for (const ham::Instance& inst : no) {
            ProtocolRunner runner = make_runner(protocol, inst, "ground", "");
            double denom = runner.diluted ? dilution_factor(inst.num_qubits()) : 1.0;
            qsp::Amplification amp{reps, 1.0 - inst.hamiltonian.alpha / denom,
                                   1.0 - inst.hamiltonian.beta / denom};
            bound = std::min(bound, amp.hoeffding_bound());
            std::uint64_t ok = run_trials(trials, seed ^ (static_cast<std::uint64_t>(reps) << 20), [&](Rng& rng, std::uint64_t) {
                return qsp::amplified_accept(amp, runner.run, rng);
            });
            sound_ok += ok;
            sound_total += trials;
        }
        comp_err = comp_total ? static_cast<double>(comp_fail) / static_cast<double>(comp_total) : 0.0;
        sound_err = sound_total ? static_cast<double>(sound_ok) / static_cast<double>(sound_total) : 0.0;
        csv << reps << "," << comp_err << "," << sound_err << "," << bound << "\n";
        std::cerr << "reps " << reps << ": completeness_err " << comp_err << ", soundness_err "
                  << sound_err << ", bound " << bound << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"qmanizk: desk-scale classically verifiable NIZK laboratory"};
    app.require_subcommand(1);

    std::string kind = "bell_stabilizer_yes", circuit, out_path;
    int gen_n = 2, witness_qubits = 1;
    auto* gen = app.add_subcommand("gen", "generate an instance file");
    gen->add_option("--kind", kind,
                    "bell_stabilizer_yes | ghz_yes | anti_stabilizer_no | anti_pair_no | random_no");
    gen->add_option("--n", gen_n, "qubit count");
    gen->add_option("--circuit", circuit,
                    "build from a circuit instead, e.g. \"H 0; CNOT 0 1; T 1\"");
    gen->add_option("--witness-qubits", witness_qubits, "witness register width for --circuit");
    gen->add_option("--out", out_path, "output path")->required();

    std::string protocol = "qsp", instance_path, cheat, dm_mode;
    std::uint64_t trials = 100000;
    std::optional<std::uint64_t> seed;
    auto* run = app.add_subcommand("run", "Monte-Carlo protocol run; JSON report on stdout");
    run->add_option("--protocol", protocol, "qsp | qsp-prime | nip | sigma | fs | bell-fs | dual");
    run->add_option("--instance", instance_path, "instance file")->required();
    run->add_option("--trials", trials, "number of independent protocol executions");
    run->add_option("--seed", seed, "base seed (default: random, printed to stderr)");
    run->add_option("--cheat", cheat, "ground | random (default honest)");
    run->add_option("--mode", dm_mode, "dual protocol: binding | hiding (default binding)");

    std::string suite = "all", mutate;
    std::optional<std::uint64_t> lemma_seed;
    auto* lemmas = app.add_subcommand("lemmas", "run invariant suites; nonzero exit on failure");
    lemmas->add_option("--suite", suite, "all | teleport | mixing | xz | energy | zk | ot");
    lemmas->add_option("--seed", lemma_seed, "suite seed");
    lemmas->add_option("--mutate", mutate,
                       "inject a known bug (pad | ot-branch) to demonstrate suite sensitivity");

    std::string sweep_protocol = "nip", sweep_dir, sweep_reps = "1,5,17,37", sweep_out;
    std::uint64_t sweep_trials = 200;
    std::optional<std::uint64_t> sweep_seed;
    auto* sweep = app.add_subcommand(
        "sweep",
        "amplification curves; CSV columns reps,completeness_err,soundness_err,hoeffding_bound "
        "(yes-instances drive completeness_err, no-instances soundness_err with the ground cheat; "
        "thresholds come from each instance's declared alpha/beta)");
    sweep->add_option("--protocol", sweep_protocol, "qsp | qsp-prime | nip | sigma | fs");
    sweep->add_option("--instances", sweep_dir, "directory of instance .json files")->required();
    sweep->add_option("--reps", sweep_reps, "comma-separated repetition counts");
    sweep->add_option("--out", sweep_out, "output CSV path")->required();
    sweep->add_option("--trials", sweep_trials, "amplified runs per point");
    sweep->add_option("--seed", sweep_seed, "base seed");

    try {
        app.parse(argc, argv);
        if (gen->parsed()) return cmd_gen(kind, gen_n, circuit, witness_qubits, out_path);
        if (run->parsed()) return cmd_run(protocol, instance_path, trials, seed, cheat, dm_mode);
        if (lemmas->parsed()) return cmd_lemmas(suite, lemma_seed, mutate);
        if (sweep->parsed()) return cmd_sweep(sweep_protocol, sweep_dir, sweep_reps, sweep_out,
                                              sweep_trials, sweep_seed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return kUsageError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsageError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
