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
 * The information-theoretic CV-NIZK in the quantum-secret-parameter model:
 * one-time key setup, teleportation-based proving, the term-sampling
 * verifier, the zero-knowledge simulator, the Bell-pair virtual protocols,
 * the posthoc energy test, gap amplification, and the simpler variants
 * (pad-free keys, and the non-ZK two-local proof).
 *
 * Proofs are a pair of N-bit strings (x, z); the verifier corrects its
 * precommitted measurement record by XOR and runs one parity check on a
 * p_i-sampled Hamiltonian term. Acceptance obeys 1 - Tr(rho H)/N' with
 * N' = 3^5 * sum_{i<=5} C(N, i).
 */

#pragma once

#include <functional>
#include <map>
#include <set>
#include <vector>

#include <nlohmann/json.hpp>

#include "qmanizk/hamiltonian.hpp"
#include "qmanizk/qsim.hpp"
#include "qmanizk/stats.hpp"

namespace qmanizk::qsp {

struct PadBit {
    std::uint8_t x = 0;
    std::uint8_t z = 0;
};

struct ProvingKey {
    QuantumState rho_p;
    Bits xhat;
    Bits zhat;
};

/// Carries pad bits only on S_V, so the verifier cannot read the others.
struct VerificationKey {
    std::vector<PauliBasis> w;
    Bits m;
    std::vector<int> s_v;  // ascending
    std::map<int, PadBit> pad_bits;
};

struct QspKeys {
    ProvingKey proving;
    VerificationKey verification;
};

struct QspProof {
    Bits x;
    Bits z;
};

struct VerifierTrace {
    std::size_t term = 0;
    bool consistent = false;
    bool heads = false;           // meaningful only when consistent
    std::map<int, int> corrected; // m'_j on S_i when the parity check ran
    bool accept = true;
};

struct VerifyOptions {
    bool use_pad_bits = true;  // mutation hook for the drift guard
};

inline QspKeys setup(int n, Rng& rng) {
    if (n < 1) throw std::invalid_argument("setup: n must be >= 1");
    std::vector<PauliBasis> w(static_cast<std::size_t>(n));
    for (auto& b : w) b = static_cast<PauliBasis>(rand_below(rng, 3));
    Bits m = rand_bits(rng, static_cast<std::size_t>(n));
    Bits xhat = rand_bits(rng, static_cast<std::size_t>(n));
    Bits zhat = rand_bits(rng, static_cast<std::size_t>(n));
    std::vector<int> s_v = random_admissible_subset(n, rng);
    std::map<int, PadBit> pads;
    for (int j : s_v) pads[j] = PadBit{xhat[static_cast<std::size_t>(j)], zhat[static_cast<std::size_t>(j)]};
    QuantumState rho_p = prepare_pauli_product(w, m);
    return QspKeys{ProvingKey{std::move(rho_p), std::move(xhat), std::move(zhat)},
                   VerificationKey{std::move(w), std::move(m), std::move(s_v), std::move(pads)}};
}

/// Bell-measure an N-qubit state pairwise against the key state and return
/// the outcome strings. Shared by the honest prover, cheats, and variants.
inline QspProof teleport_against(const QuantumState& state, const QuantumState& rho_p, Rng& rng) {
    const int n = state.num_qubits();
    if (rho_p.num_qubits() != n) throw std::invalid_argument("teleport: size mismatch");
    QuantumState joint = state.tensor(rho_p);
    QspProof proof;
    proof.x.resize(static_cast<std::size_t>(n));
    proof.z.resize(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        auto [x, z] = measure_bell(joint, j, n + j, rng);
        proof.x[static_cast<std::size_t>(j)] = static_cast<std::uint8_t>(x);
        proof.z[static_cast<std::size_t>(j)] = static_cast<std::uint8_t>(z);
    }
    return proof;
}

inline QspProof prove(const ProvingKey& kp, const ham::Instance& inst, Rng& rng) {
    if (!inst.witness.has_value()) throw std::invalid_argument("prove: missing witness");
    QuantumState framed = apply_pauli_frame(*inst.witness, PauliFrame{kp.xhat, kp.zhat});
    return teleport_against(framed, kp.rho_p, rng);
}

namespace detail {

inline bool consistent_with(const ham::PauliTerm& term, const std::vector<int>& s_v,
                            const std::vector<PauliBasis>& w) {
    if (term.paulis.size() != s_v.size()) return false;
    auto it = s_v.begin();
    for (const auto& [q, basis] : term.paulis) {
        if (it == s_v.end() || *it != q) return false;
        if (w[static_cast<std::size_t>(q)] != basis) return false;
        ++it;
    }
    return true;
}

/// Biased coin: heads with probability 1 - 3^{|S|-5}, exact as a rational.
inline bool coin_heads(std::size_t support_size, Rng& rng) {
    std::uint64_t denom = 1;
    for (std::size_t k = support_size; k < 5; ++k) denom *= 3;
    return rand_below(rng, denom) != 0;
}

inline int corrected_bit(PauliBasis w, int m, int x, int z, int xh, int zh) {
    switch (w) {
        case PauliBasis::Z: return m ^ x ^ xh;
        case PauliBasis::X: return m ^ z ^ zh;
        case PauliBasis::Y: return m ^ x ^ xh ^ z ^ zh;
    }
    return m;
}

inline bool parity_accepts(int parity, int sign) {
    // (-1)^parity == -s
    return parity == (sign > 0 ? 1 : 0);
}

}  // namespace detail

inline std::pair<bool, VerifierTrace> verify(const VerificationKey& kv, const ham::Instance& inst,
                                             const QspProof& proof, Rng& rng,
                                             const VerifyOptions& opts = {}) {
    const auto& h = inst.hamiltonian;
    const std::size_t n = static_cast<std::size_t>(h.num_qubits);
    if (proof.x.size() != n || proof.z.size() != n) {
        throw std::invalid_argument("verify: malformed proof (wrong length)");
    }
    VerifierTrace trace;
    trace.term = h.sample_term(rng);
    const auto& term = h.terms[trace.term];
    trace.consistent = detail::consistent_with(term, kv.s_v, kv.w);
    if (!trace.consistent) {
        trace.accept = true;
        return {true, trace};
    }
    trace.heads = detail::coin_heads(term.paulis.size(), rng);
    if (trace.heads) {
        trace.accept = true;
        return {true, trace};
    }
    int parity = 0;
    for (const auto& [j, basis] : term.paulis) {
        const auto& pad = kv.pad_bits.at(j);
        int xh = opts.use_pad_bits ? pad.x : 0;
        int zh = opts.use_pad_bits ? pad.z : 0;
        int mprime = detail::corrected_bit(basis, kv.m[static_cast<std::size_t>(j)],
                                           proof.x[static_cast<std::size_t>(j)],
                                           proof.z[static_cast<std::size_t>(j)], xh, zh);
        trace.corrected[j] = mprime;
        parity ^= mprime;
    }
    trace.accept = detail::parity_accepts(parity, term.sign);
    return {trace.accept, trace};
}

/// 1 - Tr(rho H)/N', the verifier's acceptance probability averaged over its
/// randomness for a fixed (corrected) teleported state.
template <typename StateT>
inline double acceptance_probability_exact(const ham::Instance& inst, const StateT& rho) {
    if (inst.num_qubits() > 10) throw std::invalid_argument("acceptance_probability_exact: N too large");
    return 1.0 - ham::energy(rho, inst.hamiltonian) / dilution_factor(inst.num_qubits());
}

/// Teleports the dense ground state through the known pad. On a no-instance
/// this realizes the acceptance ceiling 1 - beta/N'.
inline QspProof cheat_prove_optimal(const ProvingKey& kp, const ham::Instance& inst, Rng& rng) {
    auto [lambda, ground] = ham::ground_state(inst.hamiltonian);
    (void)lambda;
    QuantumState framed = apply_pauli_frame(ground, PauliFrame{kp.xhat, kp.zhat});
    return teleport_against(framed, kp.rho_p, rng);
}

inline QspProof random_proof(int n, Rng& rng) {
    return QspProof{rand_bits(rng, static_cast<std::size_t>(n)), rand_bits(rng, static_cast<std::size_t>(n))};
}

/// Zero-knowledge simulator: exact Bell statistics of the padded local
/// density matrix against the key state on S_V, uniform bits elsewhere.
inline QspProof simulate(const VerificationKey& kv, const ham::Instance& inst, Rng& rng) {
    const int n = inst.num_qubits();
    const auto& s = kv.s_v;
    const int k = static_cast<int>(s.size());
    DensityMatrix rho_s = ham::sim_hist(inst, s);
    PauliFrame pad = PauliFrame::zero(static_cast<std::size_t>(k));
    std::vector<PauliBasis> wk(static_cast<std::size_t>(k));
    Bits mk(static_cast<std::size_t>(k));
    for (int t = 0; t < k; ++t) {
        int j = s[static_cast<std::size_t>(t)];
        const auto& pb = kv.pad_bits.at(j);
        pad.x[static_cast<std::size_t>(t)] = pb.x;
        pad.z[static_cast<std::size_t>(t)] = pb.z;
        wk[static_cast<std::size_t>(t)] = kv.w[static_cast<std::size_t>(j)];
        mk[static_cast<std::size_t>(t)] = kv.m[static_cast<std::size_t>(j)];
    }
    apply_pauli_frame_in_place(rho_s, pad);
    DensityMatrix joint = rho_s.tensor(DensityMatrix(prepare_pauli_product(wk, mk)));
    std::vector<std::pair<int, int>> pairs;
    for (int t = 0; t < k; ++t) pairs.emplace_back(t, k + t);
    auto table = bell_outcome_distribution(joint, pairs);
    std::size_t outcome = sample_from_table(table, rng);

    QspProof proof;
    proof.x.assign(static_cast<std::size_t>(n), 0);
    proof.z.assign(static_cast<std::size_t>(n), 0);
    for (int t = 0; t < k; ++t) {
        int j = s[static_cast<std::size_t>(t)];
        proof.x[static_cast<std::size_t>(j)] = (outcome >> (2 * t)) & 1;
        proof.z[static_cast<std::size_t>(j)] = (outcome >> (2 * t + 1)) & 1;
    }
    for (int j = 0; j < n; ++j) {
        if (std::binary_search(s.begin(), s.end(), j)) continue;
        proof.x[static_cast<std::size_t>(j)] = static_cast<std::uint8_t>(rand_bit(rng));
        proof.z[static_cast<std::size_t>(j)] = static_cast<std::uint8_t>(rand_bit(rng));
    }
    return proof;
}

// ---------------------------------------------------------------------------
// prover strategies and the virtual protocols
// ---------------------------------------------------------------------------

/// A strategy supplies the N-qubit state it Bell-measures against the key
/// (already incorporating the pad from k_P however it likes) plus a classical
/// postprocessing of the teleport outcomes.
struct ProverStrategy {
    std::function<QuantumState(const ham::Instance&, const PauliFrame& pad)> make_state;
    std::function<QspProof(QspProof, Rng&)> postprocess =
        [](QspProof p, Rng&) { return p; };
};

inline ProverStrategy honest_strategy() {
    ProverStrategy s;
    s.make_state = [](const ham::Instance& inst, const PauliFrame& pad) {
        if (!inst.witness.has_value()) throw std::invalid_argument("honest strategy: missing witness");
        return apply_pauli_frame(*inst.witness, pad);
    };
    return s;
}

inline ProverStrategy ground_state_strategy() {
    ProverStrategy s;
    s.make_state = [](const ham::Instance& inst, const PauliFrame& pad) {
        return apply_pauli_frame(ham::ground_state(inst.hamiltonian).second, pad);
    };
    return s;
}

inline ProverStrategy random_proof_strategy() {
    ProverStrategy s;
    s.make_state = [](const ham::Instance& inst, const PauliFrame&) {
        return QuantumState(inst.num_qubits());
    };
    s.postprocess = [](QspProof p, Rng& rng) {
        return random_proof(static_cast<int>(p.x.size()), rng);
    };
    return s;
}

/// One run of the original protocol under a strategy.
inline bool run_original(const ham::Instance& inst, const ProverStrategy& strat, Rng& rng,
                         const VerifyOptions& opts = {}) {
    QspKeys keys = setup(inst.num_qubits(), rng);
    QuantumState st = strat.make_state(inst, PauliFrame{keys.proving.xhat, keys.proving.zhat});
    QspProof proof = strat.postprocess(teleport_against(st, keys.proving.rho_p, rng), rng);
    return verify(keys.verification, inst, proof, rng, opts).first;
}

/// Virtual protocol 1: Bell pairs replace the key state; the verifier
/// measures its halves in fresh random bases after receiving the proof and
/// then applies the original decision rule.
inline bool virtual1_run(const ham::Instance& inst, const ProverStrategy& strat, Rng& rng) {
    const int n = inst.num_qubits();
    if (3 * n > QuantumState::kMaxQubits) throw std::invalid_argument("virtual1_run: N too large");
    PauliFrame pad = PauliFrame::random(static_cast<std::size_t>(n), rng);
    std::vector<int> s_v = random_admissible_subset(n, rng);

    QuantumState joint = strat.make_state(inst, pad).tensor(make_bell_pairs(n));
    QspProof proof;
    proof.x.resize(static_cast<std::size_t>(n));
    proof.z.resize(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        auto [x, z] = measure_bell(joint, j, n + j, rng);
        proof.x[static_cast<std::size_t>(j)] = static_cast<std::uint8_t>(x);
        proof.z[static_cast<std::size_t>(j)] = static_cast<std::uint8_t>(z);
    }
    proof = strat.postprocess(std::move(proof), rng);

    VerificationKey kv;
    kv.w.resize(static_cast<std::size_t>(n));
    kv.m.resize(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        kv.w[static_cast<std::size_t>(j)] = static_cast<PauliBasis>(rand_below(rng, 3));
        kv.m[static_cast<std::size_t>(j)] = static_cast<std::uint8_t>(
            measure_pauli(joint, 2 * n + j, kv.w[static_cast<std::size_t>(j)], rng));
    }
    kv.s_v = s_v;
    for (int j : s_v) {
        kv.pad_bits[j] = PadBit{pad.x[static_cast<std::size_t>(j)], pad.z[static_cast<std::size_t>(j)]};
    }
    return verify(kv, inst, proof, rng).first;
}

/// Virtual protocol 2: the verifier Pauli-corrects its quantum register with
/// x xor xhat, z xor zhat, measures, and skips the classical XOR.
inline bool virtual2_run(const ham::Instance& inst, const ProverStrategy& strat, Rng& rng) {
    const int n = inst.num_qubits();
    if (3 * n > QuantumState::kMaxQubits) throw std::invalid_argument("virtual2_run: N too large");
    const auto& h = inst.hamiltonian;
    PauliFrame pad = PauliFrame::random(static_cast<std::size_t>(n), rng);
    std::vector<int> s_v = random_admissible_subset(n, rng);

    QuantumState joint = strat.make_state(inst, pad).tensor(make_bell_pairs(n));
    QspProof proof;
    proof.x.resize(static_cast<std::size_t>(n));
    proof.z.resize(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        auto [x, z] = measure_bell(joint, j, n + j, rng);
        proof.x[static_cast<std::size_t>(j)] = static_cast<std::uint8_t>(x);
        proof.z[static_cast<std::size_t>(j)] = static_cast<std::uint8_t>(z);
    }
    proof = strat.postprocess(std::move(proof), rng);

    for (int j = 0; j < n; ++j) {
        if (proof.z[static_cast<std::size_t>(j)] ^ pad.z[static_cast<std::size_t>(j)]) joint.apply_z(2 * n + j);
        if (proof.x[static_cast<std::size_t>(j)] ^ pad.x[static_cast<std::size_t>(j)]) joint.apply_x(2 * n + j);
    }
    std::vector<PauliBasis> w(static_cast<std::size_t>(n));
    Bits mprime(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        w[static_cast<std::size_t>(j)] = static_cast<PauliBasis>(rand_below(rng, 3));
        mprime[static_cast<std::size_t>(j)] = static_cast<std::uint8_t>(
            measure_pauli(joint, 2 * n + j, w[static_cast<std::size_t>(j)], rng));
    }

    std::size_t i = h.sample_term(rng);
    const auto& term = h.terms[i];
    if (!detail::consistent_with(term, s_v, w)) return true;
    if (detail::coin_heads(term.paulis.size(), rng)) return true;
    int parity = 0;
    for (const auto& [j, basis] : term.paulis) {
        (void)basis;
        parity ^= mprime[static_cast<std::size_t>(j)];
    }
    return detail::parity_accepts(parity, term.sign);
}

// ---------------------------------------------------------------------------
// posthoc energy test
// ---------------------------------------------------------------------------

/// Sample a term, measure its support in the term's bases, accept iff
/// (-1)^parity = -s_i. Acceptance probability is 1 - Tr(rho H).
inline bool energy_test(const QuantumState& state, const ham::LocalHamiltonian& h, Rng& rng) {
    if (state.dim() != (std::size_t{1} << h.num_qubits)) {
        throw std::invalid_argument("energy_test: dimension mismatch");
    }
    std::size_t i = h.sample_term(rng);
    const auto& term = h.terms[i];
    QuantumState psi = state;
    int parity = 0;
    for (const auto& [j, basis] : term.paulis) {
        parity ^= measure_pauli(psi, j, basis, rng);
    }
    return detail::parity_accepts(parity, term.sign);
}

/// Exact acceptance of energy_test by outcome enumeration (independent of
/// the Pauli-expectation path used by ham::energy).
inline double energy_test_acceptance_exact(const QuantumState& state, const ham::LocalHamiltonian& h) {
    double acc = 0;
    for (const auto& term : h.terms) {
        QuantumState psi = state;
        std::size_t support_mask = 0;
        for (const auto& [j, basis] : term.paulis) {
            auto v = v_matrix(basis);
            std::array<cplx, 4> vdag = {std::conj(v[0]), std::conj(v[2]), std::conj(v[1]), std::conj(v[3])};
            psi.apply_single(j, vdag);
            support_mask |= std::size_t{1} << j;
        }
        const int target = term.sign > 0 ? 1 : 0;
        double p = 0;
        for (std::size_t b = 0; b < psi.dim(); ++b) {
            if ((__builtin_popcountll(b & support_mask) & 1) == target) {
                p += std::norm(psi.amplitude(b));
            }
        }
        acc += term.weight * p;
    }
    return acc;
}

// ---------------------------------------------------------------------------
// gap amplification
// ---------------------------------------------------------------------------

struct Amplification {
    int reps = 1;
    double completeness = 1;  // c of the base protocol
    double soundness = 0;     // s of the base protocol

    double threshold() const { return reps * (completeness + soundness) / 2.0; }
    double hoeffding_bound() const {
        double gap = completeness - soundness;
        return std::exp(-reps * gap * gap / 2.0);
    }
};

inline int reps_for_hoeffding_bound(double c, double s, double bound) {
    double gap = c - s;
    if (gap <= 0) throw std::invalid_argument("reps_for_hoeffding_bound: need c > s");
    return static_cast<int>(std::ceil(-2.0 * std::log(bound) / (gap * gap)));
}

/// Accept iff the number of accepting base runs exceeds reps (c + s) / 2.
inline bool amplified_accept(const Amplification& amp, const std::function<bool(Rng&)>& one_run,
                             Rng& rng) {
    int accepts = 0;
    for (int r = 0; r < amp.reps; ++r) {
        Rng sub = make_rng(rand_u64(rng));
        if (one_run(sub)) ++accepts;
    }
    return accepts > amp.threshold();
}

// ---------------------------------------------------------------------------
// CV-NIP for paired {ZZ, XX} instances
// ---------------------------------------------------------------------------

struct NipKeys {
    QuantumState rho_p;  // tensor of H^h|m_j>
    int h = 0;
    Bits m;
};

inline NipKeys nip_setup(int n, Rng& rng) {
    if (n < 1) throw std::invalid_argument("nip_setup: n must be >= 1");
    int h = rand_bit(rng);
    Bits m = rand_bits(rng, static_cast<std::size_t>(n));
    std::vector<PauliBasis> w(static_cast<std::size_t>(n), h ? PauliBasis::X : PauliBasis::Z);
    return NipKeys{prepare_pauli_product(w, m), h, std::move(m)};
}

inline QspProof nip_prove(const QuantumState& rho_p, const ham::Instance& inst, Rng& rng) {
    if (!inst.witness.has_value()) throw std::invalid_argument("nip_prove: missing witness");
    return teleport_against(*inst.witness, rho_p, rng);
}

inline QspProof nip_cheat_ground(const QuantumState& rho_p, const ham::Instance& inst, Rng& rng) {
    return teleport_against(ham::ground_state(inst.hamiltonian).second, rho_p, rng);
}

inline bool nip_verify(const NipKeys& kv, const ham::Instance& inst, const QspProof& proof,
                       Rng& rng) {
    const auto pairs = ham::paired_xxzz_form(inst.hamiltonian);
    const std::size_t n = static_cast<std::size_t>(inst.num_qubits());
    if (proof.x.size() != n || proof.z.size() != n) {
        throw std::invalid_argument("nip_verify: malformed proof");
    }
    double u = rand_unit(rng);
    double acc = 0;
    const ham::NipPair* chosen = &pairs.back();
    for (const auto& p : pairs) {
        acc += p.weight;
        if (u < acc) {
            chosen = &p;
            break;
        }
    }
    auto mprime = [&](int j) {
        int corr = kv.h ? proof.z[static_cast<std::size_t>(j)] : proof.x[static_cast<std::size_t>(j)];
        return kv.m[static_cast<std::size_t>(j)] ^ corr;
    };
    int parity = mprime(chosen->j1) ^ mprime(chosen->j2);
    return detail::parity_accepts(parity, chosen->sign);
}

// ---------------------------------------------------------------------------
// pad-free variant (simpler keys, same acceptance law)
// ---------------------------------------------------------------------------

struct PrimeVerificationKey {
    std::vector<int> s_v;  // ascending
    std::vector<std::pair<PauliBasis, std::uint8_t>> wm;  // aligned with s_v
};

struct PrimeKeys {
    QuantumState rho_p;
    PrimeVerificationKey verification;
};

inline PrimeKeys nizk_prime_setup(int n, Rng& rng) {
    if (n < 1) throw std::invalid_argument("nizk_prime_setup: n must be >= 1");
    std::vector<PauliBasis> w(static_cast<std::size_t>(n));
    for (auto& b : w) b = static_cast<PauliBasis>(rand_below(rng, 3));
    Bits m = rand_bits(rng, static_cast<std::size_t>(n));
    std::vector<int> s_v = random_admissible_subset(n, rng);
    PrimeVerificationKey kv;
    kv.s_v = s_v;
    for (int j : s_v) {
        kv.wm.emplace_back(w[static_cast<std::size_t>(j)], m[static_cast<std::size_t>(j)]);
    }
    return PrimeKeys{prepare_pauli_product(w, m), std::move(kv)};
}

inline QspProof nizk_prime_prove(const QuantumState& rho_p, const ham::Instance& inst, Rng& rng) {
    if (!inst.witness.has_value()) throw std::invalid_argument("nizk_prime_prove: missing witness");
    return teleport_against(*inst.witness, rho_p, rng);
}

inline bool nizk_prime_verify(const PrimeVerificationKey& kv, const ham::Instance& inst,
                              const QspProof& proof, Rng& rng) {
    const auto& h = inst.hamiltonian;
    const std::size_t n = static_cast<std::size_t>(h.num_qubits);
    if (proof.x.size() != n || proof.z.size() != n) {
        throw std::invalid_argument("nizk_prime_verify: malformed proof");
    }
    std::size_t i = h.sample_term(rng);
    const auto& term = h.terms[i];
    if (term.paulis.size() != kv.s_v.size()) return true;
    {
        std::size_t t = 0;
        for (const auto& [q, basis] : term.paulis) {
            if (kv.s_v[t] != q || kv.wm[t].first != basis) return true;
            ++t;
        }
    }
    if (detail::coin_heads(term.paulis.size(), rng)) return true;
    int parity = 0;
    std::size_t t = 0;
    for (const auto& [q, basis] : term.paulis) {
        parity ^= detail::corrected_bit(basis, kv.wm[t].second,
                                        proof.x[static_cast<std::size_t>(q)],
                                        proof.z[static_cast<std::size_t>(q)], 0, 0);
        ++t;
    }
    return detail::parity_accepts(parity, term.sign);
}

/// Pad-free simulator analogue.
inline QspProof nizk_prime_simulate(const PrimeVerificationKey& kv, const ham::Instance& inst,
                                    Rng& rng) {
    const int n = inst.num_qubits();
    const auto& s = kv.s_v;
    const int k = static_cast<int>(s.size());
    DensityMatrix rho_s = ham::sim_hist(inst, s);
    std::vector<PauliBasis> wk(static_cast<std::size_t>(k));
    Bits mk(static_cast<std::size_t>(k));
    for (int t = 0; t < k; ++t) {
        wk[static_cast<std::size_t>(t)] = kv.wm[static_cast<std::size_t>(t)].first;
        mk[static_cast<std::size_t>(t)] = kv.wm[static_cast<std::size_t>(t)].second;
    }
    DensityMatrix joint = rho_s.tensor(DensityMatrix(prepare_pauli_product(wk, mk)));
    std::vector<std::pair<int, int>> pairs;
    for (int t = 0; t < k; ++t) pairs.emplace_back(t, k + t);
    auto table = bell_outcome_distribution(joint, pairs);
    std::size_t outcome = sample_from_table(table, rng);

    QspProof proof;
    proof.x.assign(static_cast<std::size_t>(n), 0);
    proof.z.assign(static_cast<std::size_t>(n), 0);
    for (int t = 0; t < k; ++t) {
        int j = s[static_cast<std::size_t>(t)];
        proof.x[static_cast<std::size_t>(j)] = (outcome >> (2 * t)) & 1;
        proof.z[static_cast<std::size_t>(j)] = (outcome >> (2 * t + 1)) & 1;
    }
    for (int j = 0; j < n; ++j) {
        if (std::binary_search(s.begin(), s.end(), j)) continue;
        proof.x[static_cast<std::size_t>(j)] = static_cast<std::uint8_t>(rand_bit(rng));
        proof.z[static_cast<std::size_t>(j)] = static_cast<std::uint8_t>(rand_bit(rng));
    }
    return proof;
}

// ---------------------------------------------------------------------------
// serialization
// ---------------------------------------------------------------------------

inline nlohmann::ordered_json proof_to_json(const QspProof& p) {
    nlohmann::ordered_json j;
    j["x"] = to_hex(pack_bits(p.x));
    j["z"] = to_hex(pack_bits(p.z));
    return j;
}

inline QspProof proof_from_json(const nlohmann::json& j, int n) {
    QspProof p;
    p.x = unpack_bits(from_hex(j.at("x").get<std::string>()), static_cast<std::size_t>(n));
    p.z = unpack_bits(from_hex(j.at("z").get<std::string>()), static_cast<std::size_t>(n));
    return p;
}

inline nlohmann::ordered_json verification_key_to_json(const VerificationKey& kv) {
    nlohmann::ordered_json j;
    std::string w;
    for (auto b : kv.w) w.push_back(pauli_char(b));
    j["w"] = w;
    j["m"] = to_hex(pack_bits(kv.m));
    j["s_v"] = kv.s_v;
    j["pad_bits"] = nlohmann::ordered_json::object();
    for (const auto& [q, pb] : kv.pad_bits) {
        j["pad_bits"][std::to_string(q)] = nlohmann::ordered_json::array({pb.x, pb.z});
    }
    return j;
}

}  // namespace qmanizk::qsp
