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
 * The commit-challenge-respond protocol with quantum preprocessing, its
 * Bell-pair virtual form, the programmable lazily-sampled oracle with the
 * oracle-backed commitment scheme, the Fiat-Shamir non-interactive variant
 * with its reprogramming simulator, the shared-Bell-pair setup, and
 * parallel amplification.
 *
 * One oracle serves both the commitment and challenge roles; every use is
 * domain-separated by a "COMMIT" or "FS" tag. The challenge map turns
 * oracle output into a uniform nonempty subset of [N] of size at most 5 by
 * rejection sampling 64-bit blocks into a combinatorial unranking.
 */

#pragma once

#include <functional>
#include <map>
#include <optional>
#include <vector>

#include <openssl/evp.h>

#include "qmanizk/protocol_qsp.hpp"

namespace qmanizk::fs {

// ---------------------------------------------------------------------------
// programmable random oracle
// ---------------------------------------------------------------------------

namespace detail {

inline Bytes sha256(const Bytes& data) {
    Bytes out(32);
    unsigned int len = 32;
    if (EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("sha256 failed");
    }
    return out;
}

}  // namespace detail

/// Lazily sampled random function with point reprogramming. Fresh points are
/// a deterministic PRF of (seed, input); reprogrammed points live in an
/// override table. Output width is configurable (256 bits by default; the
/// binding positive-control runs at 32).
class ProgrammableOracle {
  public:
    explicit ProgrammableOracle(std::uint64_t seed, int output_bits = 256)
        : output_bytes_(output_bits / 8) {
        if (output_bits % 8 != 0 || output_bits < 8) {
            throw std::invalid_argument("oracle output width must be a positive multiple of 8 bits");
        }
        for (int k = 0; k < 8; ++k) seed_key_.push_back(static_cast<std::uint8_t>(seed >> (8 * k)));
    }

    int output_bytes() const { return output_bytes_; }

    Bytes query(const Bytes& input) {
        ++query_count_;
        auto it = overrides_.find(input);
        Bytes out = it != overrides_.end() ? it->second : prf(input);
        if (record_transcript_) transcript_.emplace_back(input, out);
        return out;
    }

    /// Overwrites exactly one point; later queries at `input` return `output`.
    void reprogram(const Bytes& input, Bytes output) {
        if (output.size() != static_cast<std::size_t>(output_bytes_)) {
            throw std::invalid_argument("reprogram: output width mismatch");
        }
        overrides_[input] = std::move(output);
        ++reprogram_count_;
    }

    std::uint64_t query_count() const { return query_count_; }
    std::uint64_t reprogram_count() const { return reprogram_count_; }

    /// Opt-in audit trail of (input, output) pairs, dumpable as JSON.
    void record_transcript(bool on) { record_transcript_ = on; }

    nlohmann::ordered_json transcript_json() const {
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (const auto& [in, out] : transcript_) {
            nlohmann::ordered_json entry;
            entry["in"] = to_hex(in);
            entry["out"] = to_hex(out);
            arr.push_back(std::move(entry));
        }
        return arr;
    }

  private:
    Bytes prf(const Bytes& input) const {
        Bytes out;
        out.reserve(static_cast<std::size_t>(output_bytes_));
        std::uint32_t block = 0;
        while (out.size() < static_cast<std::size_t>(output_bytes_)) {
            Bytes material = seed_key_;
            append_u32(material, block++);
            append_u32(material, static_cast<std::uint32_t>(input.size()));
            material.insert(material.end(), input.begin(), input.end());
            Bytes digest = detail::sha256(material);
            for (std::uint8_t b : digest) {
                if (out.size() == static_cast<std::size_t>(output_bytes_)) break;
                out.push_back(b);
            }
        }
        return out;
    }

    int output_bytes_;
    Bytes seed_key_;
    std::map<Bytes, Bytes> overrides_;
    std::uint64_t query_count_ = 0;
    std::uint64_t reprogram_count_ = 0;
    bool record_transcript_ = false;
    std::vector<std::pair<Bytes, Bytes>> transcript_;
};

// ---------------------------------------------------------------------------
// oracle-backed commitments
// ---------------------------------------------------------------------------

constexpr std::size_t kCommitRandomnessBytes = 32;

struct Decommitment {
    Bytes message;
    Bytes randomness;
};

struct Commitment {
    Bytes com;
    Decommitment d;
};

namespace detail {

inline Bytes commit_input(const Bytes& message, const Bytes& randomness) {
    Bytes in{'C', 'O', 'M', 'M', 'I', 'T'};
    append_bytes(in, message);
    in.insert(in.end(), randomness.begin(), randomness.end());
    return in;
}

}  // namespace detail

inline Commitment commit(ProgrammableOracle& ro, const Bytes& message, Rng& rng) {
    Bytes r = rand_bytes(rng, kCommitRandomnessBytes);
    Bytes com = ro.query(detail::commit_input(message, r));
    return Commitment{std::move(com), Decommitment{message, std::move(r)}};
}

inline bool verify_commit(ProgrammableOracle& ro, const Bytes& message, const Bytes& com,
                          const Decommitment& d) {
    if (d.randomness.size() != kCommitRandomnessBytes) return false;
    return ro.query(detail::commit_input(message, d.randomness)) == com;
}

// ---------------------------------------------------------------------------
// sigma protocol with quantum preprocessing
// ---------------------------------------------------------------------------

struct SigmaVerificationKey {
    std::vector<PauliBasis> w;
    Bits m;
};

struct SigmaKeys {
    QuantumState rho_p;
    SigmaVerificationKey verification;
};

struct Msg1 {
    std::vector<Bytes> coms;  // one per qubit, index order
};

struct OpenedSlot {
    int j = 0;
    std::uint8_t x = 0;
    std::uint8_t z = 0;
    Bytes r;
};

struct Msg3 {
    std::vector<OpenedSlot> opened;  // ascending j
};

/// Prover state after the first message: all teleport outcomes and the
/// decommitment randomness per slot.
struct SigmaProverState {
    qsp::QspProof xz;
    std::vector<Bytes> rand;
};

inline Bytes encode_xz(std::uint8_t x, std::uint8_t z) {
    return Bytes{static_cast<std::uint8_t>((x & 1) | ((z & 1) << 1))};
}

inline SigmaKeys sigma_preprocess(int n, Rng& rng) {
    if (n < 1) throw std::invalid_argument("sigma_preprocess: n must be >= 1");
    std::vector<PauliBasis> w(static_cast<std::size_t>(n));
    for (auto& b : w) b = static_cast<PauliBasis>(rand_below(rng, 3));
    Bits m = rand_bits(rng, static_cast<std::size_t>(n));
    QuantumState rho_p = prepare_pauli_product(w, m);
    return SigmaKeys{std::move(rho_p), SigmaVerificationKey{std::move(w), std::move(m)}};
}

/// Quantum part: Bell-measure the given state against the key. Classical
/// part: commit each outcome pair. The honest prover teleports the witness;
/// cheats pass other states.
inline std::pair<Msg1, SigmaProverState> sigma_prove1_with_state(const QuantumState& state,
                                                                 const QuantumState& rho_p,
                                                                 ProgrammableOracle& ro, Rng& rng) {
    qsp::QspProof xz = qsp::teleport_against(state, rho_p, rng);
    Msg1 msg1;
    SigmaProverState st;
    st.xz = xz;
    for (std::size_t j = 0; j < xz.x.size(); ++j) {
        Commitment c = commit(ro, encode_xz(xz.x[j], xz.z[j]), rng);
        msg1.coms.push_back(c.com);
        st.rand.push_back(c.d.randomness);
    }
    return {std::move(msg1), std::move(st)};
}

inline std::pair<Msg1, SigmaProverState> sigma_prove1(const QuantumState& rho_p,
                                                      const ham::Instance& inst,
                                                      ProgrammableOracle& ro, Rng& rng) {
    if (!inst.witness.has_value()) throw std::invalid_argument("sigma_prove1: missing witness");
    return sigma_prove1_with_state(*inst.witness, rho_p, ro, rng);
}

/// Uniform over the admissible challenge set.
inline std::vector<int> sigma_verify1(int n, Rng& rng) {
    if (n < 1) throw std::invalid_argument("sigma_verify1: n must be >= 1");
    return random_admissible_subset(n, rng);
}

inline Msg3 sigma_prove2(const SigmaProverState& st, const std::vector<int>& s) {
    Msg3 msg3;
    for (int j : s) {
        auto ju = static_cast<std::size_t>(j);
        if (ju >= st.xz.x.size()) throw std::invalid_argument("sigma_prove2: challenge out of range");
        msg3.opened.push_back(OpenedSlot{j, st.xz.x[ju], st.xz.z[ju], st.rand[ju]});
    }
    return msg3;
}

/// Commitment checks run for every opened slot in index order before any
/// energy logic; a single failure rejects.
inline bool sigma_verify2(const SigmaVerificationKey& kv, const ham::Instance& inst,
                          const Msg1& msg1, const std::vector<int>& s, const Msg3& msg3,
                          ProgrammableOracle& ro, Rng& rng,
                          const qsp::VerifyOptions& opts = {}) {
    const auto& h = inst.hamiltonian;
    const std::size_t n = static_cast<std::size_t>(h.num_qubits);
    if (msg1.coms.size() != n) throw std::invalid_argument("sigma_verify2: malformed msg1");
    if (msg3.opened.size() != s.size()) return false;
    bool commitments_ok = true;
    for (std::size_t t = 0; t < s.size(); ++t) {
        const auto& slot = msg3.opened[t];
        if (slot.j != s[t]) {
            commitments_ok = false;
            continue;
        }
        Decommitment d{encode_xz(slot.x, slot.z), slot.r};
        if (!verify_commit(ro, d.message, msg1.coms[static_cast<std::size_t>(slot.j)], d)) {
            commitments_ok = false;
        }
    }
    if (!commitments_ok) return false;

    std::size_t i = h.sample_term(rng);
    const auto& term = h.terms[i];
    if (!qsp::detail::consistent_with(term, s, kv.w)) return true;
    if (qsp::detail::coin_heads(term.paulis.size(), rng)) return true;
    int parity = 0;
    for (const auto& [j, basis] : term.paulis) {
        auto it = std::find_if(msg3.opened.begin(), msg3.opened.end(),
                               [j = j](const OpenedSlot& o) { return o.j == j; });
        int x = it->x, z = it->z;
        if (!opts.use_pad_bits) {
            // mutation hook: ignore the teleport correction entirely
            x = 0;
            z = 0;
        }
        parity ^= qsp::detail::corrected_bit(basis, kv.m[static_cast<std::size_t>(j)], x, z, 0, 0);
    }
    return qsp::detail::parity_accepts(parity, term.sign);
}

/// One interactive run under a given teleport source.
inline bool sigma_run(const SigmaKeys& keys, const ham::Instance& inst, const QuantumState& state,
                      ProgrammableOracle& ro, Rng& rng) {
    auto [msg1, st] = sigma_prove1_with_state(state, keys.rho_p, ro, rng);
    std::vector<int> s = sigma_verify1(inst.num_qubits(), rng);
    Msg3 msg3 = sigma_prove2(st, s);
    return sigma_verify2(keys.verification, inst, msg1, s, msg3, ro, rng);
}

/// Bell-pair virtual form: the verifier holds the key halves, corrects only
/// the opened slots with the opened bits, and measures in fresh bases.
inline bool sigma_virtual_run(const ham::Instance& inst, const QuantumState& prover_state,
                              ProgrammableOracle& ro, Rng& rng) {
    const int n = inst.num_qubits();
    if (3 * n > QuantumState::kMaxQubits) throw std::invalid_argument("sigma_virtual_run: N too large");
    const auto& h = inst.hamiltonian;
    QuantumState joint = prover_state.tensor(make_bell_pairs(n));
    qsp::QspProof xz;
    xz.x.resize(static_cast<std::size_t>(n));
    xz.z.resize(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        auto [x, z] = measure_bell(joint, j, n + j, rng);
        xz.x[static_cast<std::size_t>(j)] = static_cast<std::uint8_t>(x);
        xz.z[static_cast<std::size_t>(j)] = static_cast<std::uint8_t>(z);
    }
    Msg1 msg1;
    std::vector<Bytes> rands;
    for (int j = 0; j < n; ++j) {
        Commitment c = commit(ro, encode_xz(xz.x[static_cast<std::size_t>(j)], xz.z[static_cast<std::size_t>(j)]), rng);
        msg1.coms.push_back(c.com);
        rands.push_back(c.d.randomness);
    }
    std::vector<int> s = sigma_verify1(n, rng);
    // verifier checks every opening in index order, then corrects its
    // register on S only
    bool commitments_ok = true;
    for (int j : s) {
        auto ju = static_cast<std::size_t>(j);
        Decommitment d{encode_xz(xz.x[ju], xz.z[ju]), rands[ju]};
        commitments_ok = commitments_ok && verify_commit(ro, d.message, msg1.coms[ju], d);
    }
    if (!commitments_ok) return false;
    for (int j : s) {
        auto ju = static_cast<std::size_t>(j);
        if (xz.z[ju]) joint.apply_z(2 * n + j);
        if (xz.x[ju]) joint.apply_x(2 * n + j);
    }
    std::vector<PauliBasis> w(static_cast<std::size_t>(n));
    Bits m(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        w[static_cast<std::size_t>(j)] = static_cast<PauliBasis>(rand_below(rng, 3));
        m[static_cast<std::size_t>(j)] = static_cast<std::uint8_t>(
            measure_pauli(joint, 2 * n + j, w[static_cast<std::size_t>(j)], rng));
    }
    std::size_t i = h.sample_term(rng);
    const auto& term = h.terms[i];
    if (!qsp::detail::consistent_with(term, s, w)) return true;
    if (qsp::detail::coin_heads(term.paulis.size(), rng)) return true;
    int parity = 0;
    for (const auto& [j, basis] : term.paulis) {
        (void)basis;
        parity ^= m[static_cast<std::size_t>(j)];
    }
    return qsp::detail::parity_accepts(parity, term.sign);
}

// ---------------------------------------------------------------------------
// Fiat-Shamir challenge derivation
// ---------------------------------------------------------------------------

namespace detail {

inline Bytes encode_msg1(const Msg1& msg1) {
    Bytes out;
    append_u32(out, static_cast<std::uint32_t>(msg1.coms.size()));
    for (const auto& c : msg1.coms) append_bytes(out, c);
    return out;
}

inline Bytes challenge_input(const Bytes& instance_id, const Bytes& msg1_encoding,
                             std::uint32_t counter) {
    Bytes in{'F', 'S'};
    append_bytes(in, instance_id);
    in.insert(in.end(), msg1_encoding.begin(), msg1_encoding.end());
    append_u32(in, counter);
    return in;
}

inline std::uint64_t read_u64_be(const Bytes& b, std::size_t offset) {
    std::uint64_t v = 0;
    for (int k = 0; k < 8; ++k) v = (v << 8) | b[offset + static_cast<std::size_t>(k)];
    return v;
}

inline Bytes encode_u64_be(std::uint64_t v, int width) {
    Bytes out(static_cast<std::size_t>(width), 0);
    for (int k = 0; k < 8 && k < width; ++k) {
        out[static_cast<std::size_t>(7 - k)] = static_cast<std::uint8_t>(v >> (8 * k));
    }
    return out;
}

}  // namespace detail

/// Deterministic map from the oracle to a uniform admissible subset:
/// successive 64-bit blocks of H("FS" || id || msg1 || counter) rejection
/// sample an index into the ranked subset list; counter-mode re-queries
/// extend the stream, capped at 64 blocks.
inline std::vector<int> fs_challenge(ProgrammableOracle& ro, const Bytes& instance_id, int n,
                                     const Msg1& msg1) {
    if (ro.output_bytes() < 8) {
        throw std::invalid_argument("fs_challenge: oracle output too narrow for a 64-bit block");
    }
    const std::uint64_t total = admissible_subset_count(n);
    const std::uint64_t reject_from = ~0ULL - (~0ULL % total);  // multiples of total fit below
    const Bytes enc = detail::encode_msg1(msg1);
    int blocks_seen = 0;
    for (std::uint32_t counter = 0; blocks_seen < 64; ++counter) {
        Bytes out = ro.query(detail::challenge_input(instance_id, enc, counter));
        for (std::size_t off = 0; off + 8 <= out.size() && blocks_seen < 64; off += 8, ++blocks_seen) {
            std::uint64_t v = detail::read_u64_be(out, off);
            if (v >= reject_from) continue;
            return unrank_admissible_subset(n, v % total);
        }
    }
    throw std::runtime_error("challenge derivation exhausted");
}

// ---------------------------------------------------------------------------
// Fiat-Shamir NIZK
// ---------------------------------------------------------------------------

struct FsProof {
    Msg1 msg1;
    Msg3 msg3;
};

inline FsProof fs_prove_with_state(const QuantumState& state, const QuantumState& rho_p,
                                   const Bytes& instance_id, int n, ProgrammableOracle& ro,
                                   Rng& rng) {
    auto [msg1, st] = sigma_prove1_with_state(state, rho_p, ro, rng);
    std::vector<int> s = fs_challenge(ro, instance_id, n, msg1);
    Msg3 msg3 = sigma_prove2(st, s);
    return FsProof{std::move(msg1), std::move(msg3)};
}

inline FsProof fs_prove(const QuantumState& rho_p, const ham::Instance& inst,
                        const Bytes& instance_id, ProgrammableOracle& ro, Rng& rng) {
    if (!inst.witness.has_value()) throw std::invalid_argument("fs_prove: missing witness");
    return fs_prove_with_state(*inst.witness, rho_p, instance_id, inst.num_qubits(), ro, rng);
}

inline bool fs_verify(const SigmaVerificationKey& kv, const ham::Instance& inst,
                      const Bytes& instance_id, const FsProof& proof, ProgrammableOracle& ro,
                      Rng& rng, const qsp::VerifyOptions& opts = {}) {
    std::vector<int> s = fs_challenge(ro, instance_id, inst.num_qubits(), proof.msg1);
    return sigma_verify2(kv, inst, proof.msg1, s, proof.msg3, ro, rng, opts);
}

/// Reprogramming simulator: pick the challenge first, simulate the
/// interactive transcript for it, then program the oracle so the challenge
/// derivation lands on the chosen subset (exactly one reprogrammed point).
inline FsProof fs_simulate(const QuantumState& rho_p, const ham::Instance& inst,
                           const Bytes& instance_id, ProgrammableOracle& ro, Rng& rng) {
    const int n = inst.num_qubits();
    std::vector<int> s = random_admissible_subset(n, rng);

    // interactive simulator for challenge s
    const int k = static_cast<int>(s.size());
    DensityMatrix rho_s = ham::sim_hist(inst, s);
    DensityMatrix key_part = partial_trace(rho_p, s);
    DensityMatrix joint = rho_s.tensor(key_part);
    std::vector<std::pair<int, int>> pairs;
    for (int t = 0; t < k; ++t) pairs.emplace_back(t, k + t);
    auto table = bell_outcome_distribution(joint, pairs);
    std::size_t outcome = sample_from_table(table, rng);

    Msg1 msg1;
    msg1.coms.resize(static_cast<std::size_t>(n));
    Msg3 msg3;
    std::size_t t = 0;
    std::vector<std::optional<Commitment>> slots(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        auto ju = static_cast<std::size_t>(j);
        if (t < s.size() && s[t] == j) {
            std::uint8_t x = (outcome >> (2 * t)) & 1;
            std::uint8_t z = (outcome >> (2 * t + 1)) & 1;
            Commitment c = commit(ro, encode_xz(x, z), rng);
            msg1.coms[ju] = c.com;
            msg3.opened.push_back(OpenedSlot{j, x, z, c.d.randomness});
            ++t;
        } else {
            msg1.coms[ju] = commit(ro, encode_xz(0, 0), rng).com;
        }
    }

    const std::uint64_t rank = rank_admissible_subset(n, s);
    Bytes programmed = detail::encode_u64_be(rank, 8);
    Bytes tail = rand_bytes(rng, static_cast<std::size_t>(ro.output_bytes()) - 8);
    programmed.insert(programmed.end(), tail.begin(), tail.end());
    ro.reprogram(detail::challenge_input(instance_id, detail::encode_msg1(msg1), 0), programmed);
    return FsProof{std::move(msg1), std::move(msg3)};
}

/// Interactive simulator for a fixed challenge (the Sigma-protocol analogue
/// of fs_simulate; commitments to (0,0) off the challenge set).
inline std::pair<Msg1, Msg3> sigma_simulate(const QuantumState& rho_p, const ham::Instance& inst,
                                            const std::vector<int>& s, ProgrammableOracle& ro,
                                            Rng& rng) {
    const int n = inst.num_qubits();
    const int k = static_cast<int>(s.size());
    if (k < 1 || k > 5) throw std::invalid_argument("sigma_simulate: |S| must be in [1, 5]");
    DensityMatrix rho_s = ham::sim_hist(inst, s);
    DensityMatrix key_part = partial_trace(rho_p, s);
    DensityMatrix joint = rho_s.tensor(key_part);
    std::vector<std::pair<int, int>> pairs;
    for (int t = 0; t < k; ++t) pairs.emplace_back(t, k + t);
    auto table = bell_outcome_distribution(joint, pairs);
    std::size_t outcome = sample_from_table(table, rng);
    Msg1 msg1;
    msg1.coms.resize(static_cast<std::size_t>(n));
    Msg3 msg3;
    std::size_t t = 0;
    for (int j = 0; j < n; ++j) {
        auto ju = static_cast<std::size_t>(j);
        if (t < s.size() && s[static_cast<std::size_t>(t)] == j) {
            std::uint8_t x = (outcome >> (2 * t)) & 1;
            std::uint8_t z = (outcome >> (2 * t + 1)) & 1;
            Commitment c = commit(ro, encode_xz(x, z), rng);
            msg1.coms[ju] = c.com;
            msg3.opened.push_back(OpenedSlot{j, x, z, c.d.randomness});
            ++t;
        } else {
            msg1.coms[ju] = commit(ro, encode_xz(0, 0), rng).com;
        }
    }
    return {std::move(msg1), std::move(msg3)};
}

// ---------------------------------------------------------------------------
// shared Bell pair model
// ---------------------------------------------------------------------------

/// Both halves of the setup state live in one owned register: P = qubits
/// 0..n-1, V = n..2n-1 (shifted up when the prover attaches its witness).
struct SharedBellSession {
    QuantumState joint;
    int n = 0;
    int v_offset = 0;
    bool prover_done = false;
    bool verifier_done = false;

    static SharedBellSession create(int n) {
        SharedBellSession s{make_bell_pairs(n), n, n, false, false};
        return s;
    }
};

inline FsProof shared_bell_prove(SharedBellSession& session, const ham::Instance& inst,
                                 const Bytes& instance_id, ProgrammableOracle& ro, Rng& rng) {
    if (session.prover_done) throw std::runtime_error("shared bell: prover half already measured");
    if (!inst.witness.has_value()) throw std::invalid_argument("shared_bell_prove: missing witness");
    const int n = session.n;
    if (inst.num_qubits() != n) throw std::invalid_argument("shared_bell_prove: size mismatch");
    QuantumState joint = inst.witness->tensor(session.joint);
    qsp::QspProof xz;
    xz.x.resize(static_cast<std::size_t>(n));
    xz.z.resize(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        auto [x, z] = measure_bell(joint, j, n + j, rng);
        xz.x[static_cast<std::size_t>(j)] = static_cast<std::uint8_t>(x);
        xz.z[static_cast<std::size_t>(j)] = static_cast<std::uint8_t>(z);
    }
    session.joint = joint;
    session.v_offset = 2 * n;
    session.prover_done = true;

    Msg1 msg1;
    SigmaProverState st;
    st.xz = xz;
    for (int j = 0; j < n; ++j) {
        auto ju = static_cast<std::size_t>(j);
        Commitment c = commit(ro, encode_xz(xz.x[ju], xz.z[ju]), rng);
        msg1.coms.push_back(c.com);
        st.rand.push_back(c.d.randomness);
    }
    std::vector<int> s = fs_challenge(ro, instance_id, n, msg1);
    Msg3 msg3 = sigma_prove2(st, s);
    return FsProof{std::move(msg1), std::move(msg3)};
}

/// The verifier lazily measures its halves in fresh random bases; callable
/// before or after the prover acts (the measurements commute).
inline SigmaVerificationKey shared_bell_measure_key(SharedBellSession& session, Rng& rng) {
    if (session.verifier_done) throw std::runtime_error("shared bell: verifier half already measured");
    SigmaVerificationKey kv;
    kv.w.resize(static_cast<std::size_t>(session.n));
    kv.m.resize(static_cast<std::size_t>(session.n));
    for (int j = 0; j < session.n; ++j) {
        kv.w[static_cast<std::size_t>(j)] = static_cast<PauliBasis>(rand_below(rng, 3));
        kv.m[static_cast<std::size_t>(j)] = static_cast<std::uint8_t>(
            measure_pauli(session.joint, session.v_offset + j, kv.w[static_cast<std::size_t>(j)], rng));
    }
    session.verifier_done = true;
    return kv;
}

// ---------------------------------------------------------------------------
// parallel amplification
// ---------------------------------------------------------------------------

enum class ChallengeMode { joint, per_copy };

struct AmplifiedFsProof {
    std::vector<FsProof> copies;
};

namespace detail {

inline Bytes encode_msg1_list(const std::vector<Msg1>& list) {
    Bytes out;
    append_u32(out, static_cast<std::uint32_t>(list.size()));
    for (const auto& m : list) {
        Bytes e = encode_msg1(m);
        append_bytes(out, e);
    }
    return out;
}

inline std::vector<int> joint_challenge(ProgrammableOracle& ro, const Bytes& instance_id, int n,
                                        const std::vector<Msg1>& msg1s) {
    Msg1 synth;
    synth.coms.push_back(encode_msg1_list(msg1s));
    // the synthetic single-com msg1 keeps the injective length-prefixed form
    return fs_challenge(ro, instance_id, n, synth);
}

inline Bytes per_copy_id(const Bytes& instance_id, std::uint32_t copy) {
    Bytes id = instance_id;
    append_u32(id, copy);
    return id;
}

}  // namespace detail

/// reps independent preprocessings; one FS challenge over the concatenated
/// first messages (default) or one per copy; threshold acceptance.
struct SigmaAmplification {
    int reps = 1;
    double completeness = 1;
    double soundness = 0;
    ChallengeMode mode = ChallengeMode::joint;

    double threshold() const { return reps * (completeness + soundness) / 2.0; }
};

inline AmplifiedFsProof fs_amplified_prove(const std::vector<SigmaKeys>& keys,
                                           const ham::Instance& inst, const Bytes& instance_id,
                                           const SigmaAmplification& amp, ProgrammableOracle& ro,
                                           Rng& rng) {
    if (static_cast<int>(keys.size()) != amp.reps) {
        throw std::invalid_argument("fs_amplified_prove: key count mismatch");
    }
    if (!inst.witness.has_value()) throw std::invalid_argument("fs_amplified_prove: missing witness");
    const int n = inst.num_qubits();
    std::vector<Msg1> msg1s;
    std::vector<SigmaProverState> sts;
    for (int r = 0; r < amp.reps; ++r) {
        auto [m1, st] = sigma_prove1_with_state(*inst.witness, keys[static_cast<std::size_t>(r)].rho_p, ro, rng);
        msg1s.push_back(std::move(m1));
        sts.push_back(std::move(st));
    }
    AmplifiedFsProof proof;
    for (int r = 0; r < amp.reps; ++r) {
        std::vector<int> s = amp.mode == ChallengeMode::joint
                                 ? detail::joint_challenge(ro, instance_id, n, msg1s)
                                 : fs_challenge(ro, detail::per_copy_id(instance_id, static_cast<std::uint32_t>(r)),
                                                n, msg1s[static_cast<std::size_t>(r)]);
        proof.copies.push_back(FsProof{msg1s[static_cast<std::size_t>(r)],
                                       sigma_prove2(sts[static_cast<std::size_t>(r)], s)});
    }
    return proof;
}

inline bool fs_amplified_verify(const std::vector<SigmaKeys>& keys, const ham::Instance& inst,
                                const Bytes& instance_id, const AmplifiedFsProof& proof,
                                const SigmaAmplification& amp, ProgrammableOracle& ro, Rng& rng) {
    if (static_cast<int>(proof.copies.size()) != amp.reps) return false;
    const int n = inst.num_qubits();
    std::vector<Msg1> msg1s;
    for (const auto& c : proof.copies) msg1s.push_back(c.msg1);
    int accepts = 0;
    for (int r = 0; r < amp.reps; ++r) {
        std::vector<int> s = amp.mode == ChallengeMode::joint
                                 ? detail::joint_challenge(ro, instance_id, n, msg1s)
                                 : fs_challenge(ro, detail::per_copy_id(instance_id, static_cast<std::uint32_t>(r)),
                                                n, msg1s[static_cast<std::size_t>(r)]);
        if (sigma_verify2(keys[static_cast<std::size_t>(r)].verification, inst,
                          proof.copies[static_cast<std::size_t>(r)].msg1, s,
                          proof.copies[static_cast<std::size_t>(r)].msg3, ro, rng)) {
            ++accepts;
        }
    }
    return accepts > amp.threshold();
}

// ---------------------------------------------------------------------------
// serialization
// ---------------------------------------------------------------------------

inline nlohmann::ordered_json fs_proof_to_json(const FsProof& p) {
    nlohmann::ordered_json j;
    j["msg1"] = nlohmann::ordered_json::array();
    for (const auto& c : p.msg1.coms) j["msg1"].push_back(to_hex(c));
    j["opened"] = nlohmann::ordered_json::array();
    for (const auto& o : p.msg3.opened) {
        nlohmann::ordered_json jo;
        jo["j"] = o.j;
        jo["x"] = static_cast<int>(o.x);
        jo["z"] = static_cast<int>(o.z);
        jo["r"] = to_hex(o.r);
        j["opened"].push_back(std::move(jo));
    }
    return j;
}

inline FsProof fs_proof_from_json(const nlohmann::json& j) {
    FsProof p;
    for (const auto& c : j.at("msg1")) p.msg1.coms.push_back(from_hex(c.get<std::string>()));
    for (const auto& jo : j.at("opened")) {
        OpenedSlot o;
        o.j = jo.at("j").get<int>();
        o.x = static_cast<std::uint8_t>(jo.at("x").get<int>());
        o.z = static_cast<std::uint8_t>(jo.at("z").get<int>());
        o.r = from_hex(jo.at("r").get<std::string>());
        p.msg3.opened.push_back(std::move(o));
    }
    return p;
}

}  // namespace qmanizk::fs
