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

/**
 * @file
 * Executable invariant suites behind `qmanizk lemmas`: teleportation and
 * state collapsing, Pauli mixing, the XZ-before-measurement XOR rule, the
 * posthoc energy test law, the QSP zero-knowledge enumeration checks, and
 * oblivious-transfer correctness with extraction. The same checks back the
 * unit and acceptance tests.
 */

#pragma once

#include <functional>
#include <numeric>
#include <sstream>

#include "qmanizk/dual_mode.hpp"
#include "qmanizk/fiat_shamir.hpp"
#include "qmanizk/protocol_qsp.hpp"

namespace qmanizk::suites {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct MutationFlags {
    bool drop_pad_correction = false;   // disable xhat/zhat XOR in verify
    bool literal_ot_branches = false;   // revert the receiver branch convention
};

namespace detail {

inline CheckResult check(const std::string& name, bool pass, const std::string& detail = "") {
    return CheckResult{name, pass, detail};
}

inline std::string fmt(double v) {
    std::ostringstream ss;
    ss.precision(6);
    ss << v;
    return ss.str();
}

/// Exact outcome distribution of measuring every qubit in the given bases.
inline std::vector<double> basis_measure_distribution(const QuantumState& psi,
                                                      const std::vector<PauliBasis>& w) {
    QuantumState rot = psi;
    for (std::size_t j = 0; j < w.size(); ++j) {
        auto v = v_matrix(w[j]);
        std::array<cplx, 4> vdag = {std::conj(v[0]), std::conj(v[2]), std::conj(v[1]), std::conj(v[3])};
        rot.apply_single(static_cast<int>(j), vdag);
    }
    std::vector<double> out(rot.dim());
    for (std::size_t i = 0; i < rot.dim(); ++i) out[i] = std::norm(rot.amplitude(i));
    return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// teleportation + state collapsing
// ---------------------------------------------------------------------------

inline std::vector<CheckResult> suite_teleport(std::uint64_t seed) {
    std::vector<CheckResult> out;
    Rng rng = make_rng(seed);

    // conditional post-state on B equals the frame-corrected input
    double worst_fid = 1.0;
    for (int n = 1; n <= 3; ++n) {
        for (int rep = 0; rep < 4; ++rep) {
            QuantumState psi = random_state(n, rng);
            QuantumState joint = psi.tensor(make_bell_pairs(n));
            PauliFrame frame = PauliFrame::zero(static_cast<std::size_t>(n));
            for (int j = 0; j < n; ++j) {
                auto [x, z] = measure_bell(joint, j, n + j, rng);
                frame.x[static_cast<std::size_t>(j)] = static_cast<std::uint8_t>(x);
                frame.z[static_cast<std::size_t>(j)] = static_cast<std::uint8_t>(z);
            }
            std::vector<int> b_qubits;
            for (int j = 0; j < n; ++j) b_qubits.push_back(2 * n + j);
            DensityMatrix remote = partial_trace(joint, b_qubits);
            double fid = remote.fidelity_with(apply_pauli_frame(psi, frame));
            worst_fid = std::min(worst_fid, fid);
        }
    }
    out.push_back(detail::check("teleport/post-state fidelity", worst_fid >= 1.0 - 1e-9,
                                "min fidelity " + detail::fmt(worst_fid)));

    // outcome uniformity over 10^4 trials (N = 1, chi-square at 1e-3)
    {
        std::vector<std::uint64_t> counts(4, 0);
        for (int t = 0; t < 10000; ++t) {
            Rng r = derive_rng(seed ^ 0x7e1e, static_cast<std::uint64_t>(t));
            QuantumState joint = QuantumState(1).tensor(make_bell_pairs(1));
            auto [x, z] = measure_bell(joint, 0, 1, r);
            ++counts[static_cast<std::size_t>(x + 2 * z)];
        }
        auto res = chi_square_uniform(counts);
        out.push_back(detail::check("teleport/outcome uniformity", res.p_value > 1e-3,
                                    "chi2 p = " + detail::fmt(res.p_value)));
    }

    // state collapsing: projecting one Bell half onto V(W)|m> leaves U(W)|m>
    {
        double worst = 1.0;
        for (int wi = 0; wi < 3; ++wi) {
            for (int m = 0; m < 2; ++m) {
                PauliBasis w = static_cast<PauliBasis>(wi);
                auto v = v_matrix(w);
                QuantumState bell = make_bell_pairs(1);
                project_qubit(bell, 0,
                              {m == 0 ? v[0] : v[1], m == 0 ? v[2] : v[3]});
                DensityMatrix other = partial_trace(bell, {1});
                QuantumState expect =
                    prepare_pauli_product({w}, {static_cast<std::uint8_t>(m)});
                worst = std::min(worst, other.fidelity_with(expect));
            }
        }
        out.push_back(detail::check("teleport/state collapsing", worst >= 1.0 - 1e-9,
                                    "min fidelity " + detail::fmt(worst)));
    }

    // measurements preserve normalization
    {
        double worst = 0.0;
        for (int rep = 0; rep < 8; ++rep) {
            QuantumState psi = random_state(3, rng);
            measure_pauli(psi, static_cast<int>(rand_below(rng, 3)),
                          static_cast<PauliBasis>(rand_below(rng, 3)), rng);
            worst = std::max(worst, std::abs(psi.norm() - 1.0));
            QuantumState joint = psi.tensor(make_bell_pairs(1));
            measure_bell(joint, 0, 3, rng);
            worst = std::max(worst, std::abs(joint.norm() - 1.0));
        }
        out.push_back(detail::check("teleport/normalization preserved", worst <= 1e-9,
                                    "max drift " + detail::fmt(worst)));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Pauli mixing
// ---------------------------------------------------------------------------

inline std::vector<CheckResult> suite_mixing(std::uint64_t seed) {
    std::vector<CheckResult> out;
    Rng rng = make_rng(seed);
    double worst = 0.0;
    for (int rep = 0; rep < 6; ++rep) {
        // random (generally mixed) 2-qubit state from a random 4-qubit pure one
        QuantumState big = random_state(4, rng);
        DensityMatrix rho = partial_trace(big, {0, 1});
        Eigen::MatrixXcd avg = Eigen::MatrixXcd::Zero(4, 4);
        for (int x = 0; x < 2; ++x) {
            for (int z = 0; z < 2; ++z) {
                DensityMatrix conj = rho;
                PauliFrame f = PauliFrame::zero(2);
                f.x[0] = static_cast<std::uint8_t>(x);
                f.z[0] = static_cast<std::uint8_t>(z);
                apply_pauli_frame_in_place(conj, f);
                avg += 0.25 * conj.matrix();
            }
        }
        DensityMatrix rest = partial_trace(rho, {1});
        Eigen::MatrixXcd target =
            DensityMatrix::maximally_mixed(1).tensor(rest).matrix();
        worst = std::max(worst, (avg - target).cwiseAbs().maxCoeff());
    }
    out.push_back(detail::check("mixing/quarter-average equals I/2 (x) Tr_A", worst <= 1e-9,
                                "max entry deviation " + detail::fmt(worst)));
    return out;
}

// ---------------------------------------------------------------------------
// XZ before measurement
// ---------------------------------------------------------------------------

inline std::vector<CheckResult> suite_xz(std::uint64_t seed) {
    std::vector<CheckResult> out;
    Rng rng = make_rng(seed);
    double worst_tv = 0.0;
    for (int n = 1; n <= 3; ++n) {
        QuantumState psi = random_state(n, rng);
        std::size_t basis_combos = 1;
        for (int j = 0; j < n; ++j) basis_combos *= 3;
        for (std::size_t bc = 0; bc < basis_combos; ++bc) {
            std::vector<PauliBasis> w(static_cast<std::size_t>(n));
            std::size_t rem = bc;
            for (int j = 0; j < n; ++j) {
                w[static_cast<std::size_t>(j)] = static_cast<PauliBasis>(rem % 3);
                rem /= 3;
            }
            auto raw = detail::basis_measure_distribution(psi, w);
            for (std::size_t fx = 0; fx < (std::size_t{1} << n); ++fx) {
                for (std::size_t fz = 0; fz < (std::size_t{1} << n); ++fz) {
                    PauliFrame frame = PauliFrame::zero(static_cast<std::size_t>(n));
                    std::size_t cmask = 0;
                    for (int j = 0; j < n; ++j) {
                        int x = (fx >> j) & 1;
                        int z = (fz >> j) & 1;
                        frame.x[static_cast<std::size_t>(j)] = static_cast<std::uint8_t>(x);
                        frame.z[static_cast<std::size_t>(j)] = static_cast<std::uint8_t>(z);
                        int c = 0;
                        switch (w[static_cast<std::size_t>(j)]) {
                            case PauliBasis::Z: c = x; break;
                            case PauliBasis::X: c = z; break;
                            case PauliBasis::Y: c = x ^ z; break;
                        }
                        if (c) cmask |= std::size_t{1} << j;
                    }
                    auto framed = detail::basis_measure_distribution(apply_pauli_frame(psi, frame), w);
                    double tv = 0;
                    for (std::size_t m = 0; m < raw.size(); ++m) {
                        tv += std::abs(framed[m ^ cmask] - raw[m]);
                    }
                    worst_tv = std::max(worst_tv, 0.5 * tv);
                }
            }
        }
    }
    out.push_back(detail::check("xz/XOR rule matches framed measurement", worst_tv <= 1e-9,
                                "max TV " + detail::fmt(worst_tv)));
    return out;
}

// ---------------------------------------------------------------------------
// posthoc energy test
// ---------------------------------------------------------------------------

inline ham::LocalHamiltonian random_hamiltonian(int n, int terms, Rng& rng) {
    ham::LocalHamiltonian h;
    h.num_qubits = n;
    double total = 0;
    std::vector<double> raw;
    for (int i = 0; i < terms; ++i) {
        double wgt = 0.05 + rand_unit(rng);
        raw.push_back(wgt);
        total += wgt;
    }
    for (int i = 0; i < terms; ++i) {
        ham::PauliTerm t;
        t.weight = raw[static_cast<std::size_t>(i)] / total;
        t.sign = rand_bit(rng) ? +1 : -1;
        int support = 1 + static_cast<int>(rand_below(rng, static_cast<std::uint64_t>(std::min(n, 3))));
        std::vector<int> qubits(static_cast<std::size_t>(n));
        std::iota(qubits.begin(), qubits.end(), 0);
        for (int k = 0; k < support; ++k) {
            std::size_t pick = static_cast<std::size_t>(k) +
                               static_cast<std::size_t>(rand_below(rng, static_cast<std::uint64_t>(n - k)));
            std::swap(qubits[static_cast<std::size_t>(k)], qubits[pick]);
            t.paulis[qubits[static_cast<std::size_t>(k)]] = static_cast<PauliBasis>(rand_below(rng, 3));
        }
        h.terms.push_back(std::move(t));
    }
    h.alpha = 0.1;
    h.beta = 0.9;
    return h;
}

inline std::vector<CheckResult> suite_energy(std::uint64_t seed) {
    std::vector<CheckResult> out;
    Rng rng = make_rng(seed);

    double worst = 0.0;
    for (int rep = 0; rep < 20; ++rep) {
        int n = 1 + static_cast<int>(rand_below(rng, 3));
        QuantumState psi = random_state(n, rng);
        auto h = random_hamiltonian(n, 2 + static_cast<int>(rand_below(rng, 3)), rng);
        double enumerated = qsp::energy_test_acceptance_exact(psi, h);
        double law = 1.0 - ham::energy(psi, h);
        worst = std::max(worst, std::abs(enumerated - law));
    }
    out.push_back(detail::check("energy/enumerated acceptance equals 1 - Tr(rho H)", worst <= 1e-9,
                                "max |diff| " + detail::fmt(worst)));

    // stabilizer extremes on the Bell pair
    {
        auto bell = make_bell_pairs(1);
        ham::LocalHamiltonian hminus, hplus;
        hminus.num_qubits = hplus.num_qubits = 2;
        ham::PauliTerm t;
        t.weight = 1.0;
        t.paulis[0] = PauliBasis::X;
        t.paulis[1] = PauliBasis::X;
        t.sign = -1;
        hminus.terms.push_back(t);
        t.sign = +1;
        hplus.terms.push_back(t);
        hminus.alpha = hplus.alpha = 0.1;
        hminus.beta = hplus.beta = 0.9;
        bool all_accept = true, all_reject = true;
        for (int rep = 0; rep < 2000; ++rep) {
            Rng r = derive_rng(seed ^ 0xbe11, static_cast<std::uint64_t>(rep));
            all_accept = all_accept && qsp::energy_test(bell, hminus, r);
            all_reject = all_reject && !qsp::energy_test(bell, hplus, r);
        }
        out.push_back(detail::check("energy/Bell stabilizer accepts always", all_accept));
        out.push_back(detail::check("energy/Bell anti-stabilizer rejects always", all_reject));
    }

    // term projectors square to themselves
    {
        double worst_proj = 0.0;
        auto h = random_hamiltonian(4, 4, rng);
        for (const auto& term : h.terms) {
            ham::LocalHamiltonian single;
            single.num_qubits = 4;
            ham::PauliTerm t = term;
            t.weight = 1.0;
            single.terms.push_back(t);
            single.alpha = 0.1;
            single.beta = 0.9;
            Eigen::MatrixXcd p = ham::dense_matrix(single);
            worst_proj = std::max(worst_proj, (p * p - p).cwiseAbs().maxCoeff());
        }
        out.push_back(detail::check("energy/terms are projectors", worst_proj <= 1e-9,
                                    "max |P^2 - P| " + detail::fmt(worst_proj)));
    }
    return out;
}

// ---------------------------------------------------------------------------
// zero-knowledge (QSP) and the acceptance law
// ---------------------------------------------------------------------------

/// Exact proof distribution of the honest prover for a fixed verification
/// key, marginalized over the pad bits the key does not carry.
inline std::vector<double> qsp_prove_distribution_exact(const qsp::VerificationKey& kv,
                                                        const ham::Instance& inst) {
    const int n = inst.num_qubits();
    QuantumState rho_p = prepare_pauli_product(kv.w, kv.m);
    std::vector<int> hidden;
    for (int j = 0; j < n; ++j) {
        if (!std::binary_search(kv.s_v.begin(), kv.s_v.end(), j)) hidden.push_back(j);
    }
    const std::size_t combos = std::size_t{1} << (2 * hidden.size());
    std::vector<double> table(std::size_t{1} << (2 * n), 0.0);
    std::vector<std::pair<int, int>> pairs;
    for (int j = 0; j < n; ++j) pairs.emplace_back(j, n + j);
    for (std::size_t combo = 0; combo < combos; ++combo) {
        PauliFrame pad = PauliFrame::zero(static_cast<std::size_t>(n));
        for (int j : kv.s_v) {
            pad.x[static_cast<std::size_t>(j)] = kv.pad_bits.at(j).x;
            pad.z[static_cast<std::size_t>(j)] = kv.pad_bits.at(j).z;
        }
        for (std::size_t t = 0; t < hidden.size(); ++t) {
            pad.x[static_cast<std::size_t>(hidden[t])] = (combo >> (2 * t)) & 1;
            pad.z[static_cast<std::size_t>(hidden[t])] = (combo >> (2 * t + 1)) & 1;
        }
        QuantumState framed = apply_pauli_frame(*inst.witness, pad);
        auto sub = bell_outcome_distribution(framed.tensor(rho_p), pairs);
        for (std::size_t i = 0; i < sub.size(); ++i) table[i] += sub[i] / static_cast<double>(combos);
    }
    return table;
}

/// Exact simulator distribution for the same key: the S_V block from the
/// padded local density matrix, uniform elsewhere.
inline std::vector<double> qsp_simulate_distribution_exact(const qsp::VerificationKey& kv,
                                                           const ham::Instance& inst) {
    const int n = inst.num_qubits();
    const auto& s = kv.s_v;
    const int k = static_cast<int>(s.size());
    DensityMatrix rho_s = ham::sim_hist(inst, s);
    PauliFrame pad = PauliFrame::zero(static_cast<std::size_t>(k));
    std::vector<PauliBasis> wk(static_cast<std::size_t>(k));
    Bits mk(static_cast<std::size_t>(k));
    for (int t = 0; t < k; ++t) {
        int j = s[static_cast<std::size_t>(t)];
        pad.x[static_cast<std::size_t>(t)] = kv.pad_bits.at(j).x;
        pad.z[static_cast<std::size_t>(t)] = kv.pad_bits.at(j).z;
        wk[static_cast<std::size_t>(t)] = kv.w[static_cast<std::size_t>(j)];
        mk[static_cast<std::size_t>(t)] = kv.m[static_cast<std::size_t>(j)];
    }
    apply_pauli_frame_in_place(rho_s, pad);
    DensityMatrix joint = rho_s.tensor(DensityMatrix(prepare_pauli_product(wk, mk)));
    std::vector<std::pair<int, int>> pairs;
    for (int t = 0; t < k; ++t) pairs.emplace_back(t, k + t);
    auto sub = bell_outcome_distribution(joint, pairs);

    std::vector<double> table(std::size_t{1} << (2 * n), 0.0);
    const double uniform = 1.0 / static_cast<double>(std::size_t{1} << (2 * (n - k)));
    for (std::size_t idx = 0; idx < table.size(); ++idx) {
        std::size_t sub_idx = 0;
        bool dummy = false;
        (void)dummy;
        for (int t = 0; t < k; ++t) {
            int j = s[static_cast<std::size_t>(t)];
            std::size_t x = (idx >> (2 * j)) & 1;
            std::size_t z = (idx >> (2 * j + 1)) & 1;
            sub_idx |= (x | (z << 1)) << (2 * t);
        }
        table[idx] = sub[sub_idx] * uniform;
    }
    return table;
}

inline std::vector<CheckResult> suite_zk(std::uint64_t seed, const MutationFlags& mut = {}) {
    std::vector<CheckResult> out;
    auto inst = ham::make_handcrafted_instance("ghz_yes", 3);

    // exact prove-vs-simulate TV on a handful of fixed keys
    double worst_tv = 0.0;
    for (int rep = 0; rep < 4; ++rep) {
        Rng rng = derive_rng(seed ^ 0x2b, static_cast<std::uint64_t>(rep));
        auto keys = qsp::setup(3, rng);
        auto prove_table = qsp_prove_distribution_exact(keys.verification, inst);
        auto sim_table = qsp_simulate_distribution_exact(keys.verification, inst);
        worst_tv = std::max(worst_tv, total_variation(prove_table, sim_table));
    }
    out.push_back(detail::check("zk/prove vs simulate exact TV <= 1e-6", worst_tv <= 1e-6,
                                "max TV " + detail::fmt(worst_tv)));

    // off-S_V bits of the simulator are uniform
    {
        Rng rng = make_rng(seed ^ 0x11);
        auto keys = qsp::setup(3, rng);
        std::vector<int> off;
        for (int j = 0; j < 3; ++j) {
            if (!std::binary_search(keys.verification.s_v.begin(), keys.verification.s_v.end(), j)) {
                off.push_back(j);
            }
        }
        bool ok = true;
        std::string detail_str = "no off-key qubits";
        if (!off.empty()) {
            std::vector<std::uint64_t> counts(std::size_t{1} << (2 * off.size()), 0);
            for (int t = 0; t < 20000; ++t) {
                Rng r = derive_rng(seed ^ 0x5a, static_cast<std::uint64_t>(t));
                auto proof = qsp::simulate(keys.verification, inst, r);
                std::size_t key = 0;
                for (std::size_t u = 0; u < off.size(); ++u) {
                    key |= static_cast<std::size_t>(proof.x[static_cast<std::size_t>(off[u])] |
                                                    (proof.z[static_cast<std::size_t>(off[u])] << 1))
                           << (2 * u);
                }
                ++counts[key];
            }
            auto res = chi_square_uniform(counts);
            ok = res.p_value > 1e-3;
            detail_str = "chi2 p = " + detail::fmt(res.p_value);
        }
        out.push_back(detail::check("zk/off-key bits uniform", ok, detail_str));
    }

    // acceptance law on the alpha = 0 instance (honest run accepts with
    // probability exactly 1; pad-corrected verification is what makes it so)
    {
        auto bell = ham::make_handcrafted_instance("bell_stabilizer_yes", 2);
        qsp::VerifyOptions opts;
        opts.use_pad_bits = !mut.drop_pad_correction;
        std::uint64_t rejects = 0;
        const std::uint64_t trials = 20000;
        for (std::uint64_t t = 0; t < trials; ++t) {
            Rng r = derive_rng(seed ^ 0xacce97, t);
            auto keys = qsp::setup(2, r);
            auto proof = qsp::prove(keys.proving, bell, r);
            if (!qsp::verify(keys.verification, bell, proof, r, opts).first) ++rejects;
        }
        out.push_back(detail::check("zk/acceptance law (alpha = 0 accepts always)", rejects == 0,
                                    std::to_string(rejects) + " rejects in " + std::to_string(trials)));
    }
    return out;
}

// ---------------------------------------------------------------------------
// oblivious transfer
// ---------------------------------------------------------------------------

inline std::vector<CheckResult> suite_ot(std::uint64_t seed, const MutationFlags& mut = {}) {
    std::vector<CheckResult> out;
    const auto conv = mut.literal_ot_branches ? dm::BranchConvention::chosen_slot_one
                                              : dm::BranchConvention::prefix_ones;

    // exhaustive 1-of-n, both modes, plus extraction in hiding mode
    {
        bool derive_ok = true;
        bool extract_ok = true;
        for (dm::DmeMode mode : {dm::DmeMode::dec, dm::DmeMode::messy}) {
            dm::DmeWorld world;
            Rng rng = make_rng(seed ^ static_cast<std::uint64_t>(mode));
            auto [crs, td] = world.setup(mode, rng);
            for (int n = 1; n <= 4; ++n) {
                for (int j = 1; j <= n; ++j) {
                    for (int rep = 0; rep < 25; ++rep) {
                        std::vector<Bytes> mus;
                        for (int i = 0; i < n; ++i) mus.push_back(rand_bytes(rng, 8));
                        auto [ot1, st] = dm::ot1n_receiver(world, crs, n, j, rng, conv);
                        auto ot2 = dm::ot1n_sender(world, crs, ot1, mus, rng);
                        try {
                            derive_ok = derive_ok &&
                                        dm::ot1n_derive(world, crs, st, ot2) == mus[static_cast<std::size_t>(j - 1)];
                        } catch (const dm::DmeDecryptError&) {
                            derive_ok = false;
                        }
                        if (mode == dm::DmeMode::messy) {
                            auto op = dm::ot_open_rec1(world, td, ot1);
                            extract_ok = extract_ok && op.j == j && !op.flagged;
                        }
                    }
                }
            }
        }
        out.push_back(detail::check("ot/1-of-n exhaustive correctness", derive_ok));
        out.push_back(detail::check("ot/extractor recovers honest index", extract_ok));
    }

    // k-of-n sweeps with random choice lists (duplicates allowed)
    {
        bool ok = true;
        dm::DmeWorld world;
        Rng rng = make_rng(seed ^ 0x6b6e);
        auto [crs, td] = world.setup(dm::DmeMode::messy, rng);
        for (int n = 2; n <= 8; ++n) {
            for (int k = 1; k <= 5; ++k) {
                for (int rep = 0; rep < 8; ++rep) {
                    std::vector<int> j_list;
                    for (int c = 0; c < k; ++c) {
                        j_list.push_back(1 + static_cast<int>(rand_below(rng, static_cast<std::uint64_t>(n))));
                    }
                    std::vector<Bytes> mus;
                    for (int i = 0; i < n; ++i) mus.push_back(rand_bytes(rng, 12));
                    auto [ot1, st] = dm::otkn_receiver(world, crs, n, j_list, rng, conv);
                    auto ot2 = dm::otkn_sender(world, crs, ot1, mus, rng);
                    try {
                        auto got = dm::otkn_derive(world, crs, st, ot2);
                        for (int c = 0; c < k; ++c) {
                            ok = ok && got[static_cast<std::size_t>(c)] ==
                                           mus[static_cast<std::size_t>(j_list[static_cast<std::size_t>(c)] - 1)];
                        }
                    } catch (const dm::DmeDecryptError&) {
                        ok = false;
                    }
                    auto [opened, flagged] = dm::ot_open_rec(world, td, ot1);
                    ok = ok && !flagged && opened == j_list;
                }
            }
        }
        out.push_back(detail::check("ot/k-of-n sweep with extraction", ok));
    }
    return out;
}

// ---------------------------------------------------------------------------
// registry
// ---------------------------------------------------------------------------

inline std::map<std::string, std::function<std::vector<CheckResult>(std::uint64_t, const MutationFlags&)>>
suite_registry() {
    return {
        {"teleport", [](std::uint64_t s, const MutationFlags&) { return suite_teleport(s); }},
        {"mixing", [](std::uint64_t s, const MutationFlags&) { return suite_mixing(s); }},
        {"xz", [](std::uint64_t s, const MutationFlags&) { return suite_xz(s); }},
        {"energy", [](std::uint64_t s, const MutationFlags&) { return suite_energy(s); }},
        {"zk", [](std::uint64_t s, const MutationFlags& m) { return suite_zk(s, m); }},
        {"ot", [](std::uint64_t s, const MutationFlags& m) { return suite_ot(s, m); }},
    };
}

}  // namespace qmanizk::suites
