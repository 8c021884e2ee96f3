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
 * The dual-mode CV-NIZK with preprocessing: a toy Regev lossy encryption
 * (real encryption, so the re-encryption binding check means something), an
 * ideal-functionality dual-mode encryption over in-process trusted tables,
 * the chained 1-out-of-n oblivious transfer with its k-parallel composition
 * and receiver extractor, and the composed protocol with both the binding
 * and hiding common reference strings plus the trapdoor simulator.
 *
 * OT receiver branch bits follow the telescoping convention sigma_i = 1 for
 * i < j and sigma_i = 0 otherwise, which makes Derive's XOR chain collapse
 * to mu_j; the non-reconstructing single-slot convention is kept selectable
 * for the drift-guard tests.
 */

#pragma once

#include <array>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "qmanizk/protocol_qsp.hpp"

namespace qmanizk::dm {

// ---------------------------------------------------------------------------
// toy Regev lossy encryption, message space {0,1}^2
// ---------------------------------------------------------------------------

constexpr int kLeDim = 16;
constexpr int kLeModulus = 257;
constexpr int kLeNoiseBound = 4;
constexpr int kLeSamples = 48;
constexpr std::size_t kLeRandomnessBytes = 96;  // two 48-entry 0/1 selection vectors
constexpr int kLeHalf = kLeModulus / 2;         // 128, the message scale

struct LePublicKey {
    // kLeSamples rows of dimension kLeDim, plus the b column
    std::vector<std::array<std::uint16_t, kLeDim>> a;
    std::vector<std::uint16_t> b;
};

struct LeSecretKey {
    std::array<std::uint16_t, kLeDim> s{};
};

struct LeKeypair {
    LePublicKey pk;
    std::optional<LeSecretKey> sk;  // injective keys only
};

struct LeCiphertext {
    std::array<std::uint16_t, kLeDim> u1{};
    std::uint16_t c1 = 0;
    std::array<std::uint16_t, kLeDim> u2{};
    std::uint16_t c2 = 0;

    bool operator==(const LeCiphertext& o) const {
        return u1 == o.u1 && c1 == o.c1 && u2 == o.u2 && c2 == o.c2;
    }
    bool operator!=(const LeCiphertext& o) const { return !(*this == o); }
};

using LeRandomness = std::array<std::uint8_t, kLeRandomnessBytes>;

namespace detail {

inline std::uint16_t mod_q(long v) {
    long r = v % kLeModulus;
    if (r < 0) r += kLeModulus;
    return static_cast<std::uint16_t>(r);
}

inline LePublicKey random_matrix_key(Rng& rng) {
    LePublicKey pk;
    pk.a.resize(kLeSamples);
    pk.b.resize(kLeSamples);
    for (auto& row : pk.a) {
        for (auto& v : row) v = static_cast<std::uint16_t>(rand_below(rng, kLeModulus));
    }
    return pk;
}

}  // namespace detail

/// Injective keypair. The noise is sparse and resampled until
/// sum_i |e_i| <= floor(q/4) - 1, which makes every subset-sum distance to a
/// q/2-scaled message strictly below the decision threshold: decryption is
/// exact for all randomness.
inline LeKeypair le_inj_gen(Rng& rng) {
    LeKeypair kp;
    kp.pk = detail::random_matrix_key(rng);
    LeSecretKey sk;
    for (auto& v : sk.s) v = static_cast<std::uint16_t>(rand_below(rng, kLeModulus));
    std::vector<int> e(kLeSamples);
    for (;;) {
        int total = 0;
        for (auto& ei : e) {
            if (rand_below(rng, 4) == 0) {
                int mag = 1 + static_cast<int>(rand_below(rng, kLeNoiseBound));
                ei = rand_bit(rng) ? mag : -mag;
            } else {
                ei = 0;
            }
            total += std::abs(ei);
        }
        if (total <= kLeModulus / 4 - 1) break;
    }
    for (int i = 0; i < kLeSamples; ++i) {
        long dot = 0;
        for (int k = 0; k < kLeDim; ++k) {
            dot += static_cast<long>(kp.pk.a[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)]) * sk.s[static_cast<std::size_t>(k)];
        }
        kp.pk.b[static_cast<std::size_t>(i)] = detail::mod_q(dot + e[static_cast<std::size_t>(i)]);
    }
    kp.sk = sk;
    return kp;
}

/// Lossy key: the b column is uniform, untethered to any secret.
inline LePublicKey le_lossy_gen(Rng& rng) {
    LePublicKey pk = detail::random_matrix_key(rng);
    for (auto& v : pk.b) v = static_cast<std::uint16_t>(rand_below(rng, kLeModulus));
    return pk;
}

inline LeRandomness le_random_coins(Rng& rng) {
    LeRandomness r{};
    for (auto& v : r) v = static_cast<std::uint8_t>(rand_bit(rng));
    return r;
}

/// Deterministic in (pk, message, R): two subset sums, one per message bit,
/// each bit scaled by floor(q/2).
inline LeCiphertext le_enc(const LePublicKey& pk, std::uint8_t two_bits, const LeRandomness& r) {
    LeCiphertext ct;
    auto encrypt_half = [&](int half, int bit, std::array<std::uint16_t, kLeDim>& u, std::uint16_t& c) {
        long acc[kLeDim] = {0};
        long cb = 0;
        for (int i = 0; i < kLeSamples; ++i) {
            if (!r[static_cast<std::size_t>(half * kLeSamples + i)]) continue;
            for (int k = 0; k < kLeDim; ++k) acc[k] += pk.a[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
            cb += pk.b[static_cast<std::size_t>(i)];
        }
        for (int k = 0; k < kLeDim; ++k) u[static_cast<std::size_t>(k)] = detail::mod_q(acc[k]);
        c = detail::mod_q(cb + static_cast<long>(bit) * kLeHalf);
    };
    encrypt_half(0, two_bits & 1, ct.u1, ct.c1);
    encrypt_half(1, (two_bits >> 1) & 1, ct.u2, ct.c2);
    return ct;
}

inline std::uint8_t le_dec(const LeSecretKey& sk, const LeCiphertext& ct) {
    auto decode = [&](const std::array<std::uint16_t, kLeDim>& u, std::uint16_t c) {
        long dot = 0;
        for (int k = 0; k < kLeDim; ++k) dot += static_cast<long>(u[static_cast<std::size_t>(k)]) * sk.s[static_cast<std::size_t>(k)];
        int v = detail::mod_q(static_cast<long>(c) - dot);
        int dist0 = std::min(v, kLeModulus - v);
        int dist1 = std::abs(v - kLeHalf);
        if (std::min(dist0, dist1) > kLeModulus / 4 - 1) {
            throw std::logic_error("le_dec: decryption ambiguity (margin violated)");
        }
        return dist1 < dist0 ? 1 : 0;
    };
    return static_cast<std::uint8_t>(decode(ct.u1, ct.c1) | (decode(ct.u2, ct.c2) << 1));
}

inline Bytes le_ciphertext_bytes(const LeCiphertext& ct) {
    Bytes out;
    auto push16 = [&](std::uint16_t v) {
        out.push_back(static_cast<std::uint8_t>(v & 0xff));
        out.push_back(static_cast<std::uint8_t>(v >> 8));
    };
    for (auto v : ct.u1) push16(v);
    push16(ct.c1);
    for (auto v : ct.u2) push16(v);
    push16(ct.c2);
    return out;
}

inline Bytes le_public_key_bytes(const LePublicKey& pk) {
    Bytes out;
    auto push16 = [&](std::uint16_t v) {
        out.push_back(static_cast<std::uint8_t>(v & 0xff));
        out.push_back(static_cast<std::uint8_t>(v >> 8));
    };
    for (const auto& row : pk.a) {
        for (auto v : row) push16(v);
    }
    for (auto v : pk.b) push16(v);
    return out;
}

// ---------------------------------------------------------------------------
// ideal dual-mode encryption (in-process trusted tables)
// ---------------------------------------------------------------------------

enum class DmeMode { messy, dec };

struct DmeCrs {
    Bytes id;
};

struct DmeTrapdoor {
    Bytes crs_id;
    DmeMode mode = DmeMode::messy;
};

struct DmeDecryptError : std::runtime_error {
    explicit DmeDecryptError(const std::string& what) : std::runtime_error(what) {}
};

/// Session-scoped registry backing the ideal functionality. Handles are
/// random byte strings; all semantics live in the tables.
class DmeWorld {
  public:
    static constexpr std::size_t kHandleBytes = 16;

    std::pair<DmeCrs, DmeTrapdoor> setup(DmeMode mode, Rng& rng) {
        DmeCrs crs{rand_bytes(rng, kHandleBytes)};
        crs_.emplace(crs.id, mode);
        return {crs, DmeTrapdoor{crs.id, mode}};
    }

    std::pair<Bytes, Bytes> keygen(const DmeCrs& crs, int branch, Rng& rng) {
        require_crs(crs.id);
        if (branch != 0 && branch != 1) throw std::invalid_argument("keygen: branch must be 0 or 1");
        Bytes pk = rand_bytes(rng, kHandleBytes);
        Bytes sk = rand_bytes(rng, kHandleBytes);
        keys_.emplace(pk, KeyInfo{crs.id, branch, false});
        sks_.emplace(sk, SkInfo{pk, branch});
        return {pk, sk};
    }

    /// Registers both branches as decryptable; decryption-mode trapdoor only.
    std::tuple<Bytes, Bytes, Bytes> trapkeygen(const DmeTrapdoor& td, Rng& rng) {
        require_crs(td.crs_id);
        if (td.mode != DmeMode::dec) throw std::invalid_argument("trapkeygen: needs a decryption-mode trapdoor");
        Bytes pk = rand_bytes(rng, kHandleBytes);
        Bytes sk0 = rand_bytes(rng, kHandleBytes);
        Bytes sk1 = rand_bytes(rng, kHandleBytes);
        keys_.emplace(pk, KeyInfo{td.crs_id, 0, true});
        sks_.emplace(sk0, SkInfo{pk, 0});
        sks_.emplace(sk1, SkInfo{pk, 1});
        return {pk, sk0, sk1};
    }

    /// Messy-branch ciphertexts are fresh random bytes with no table entry;
    /// decryptable-branch ciphertexts are authenticated table entries.
    Bytes enc(const DmeCrs& crs, const Bytes& pk, int branch, const Bytes& message, Rng& rng) {
        require_crs(crs.id);
        Bytes ct = rand_bytes(rng, kHandleBytes);
        auto it = keys_.find(pk);
        bool decryptable = it != keys_.end() && it->second.crs_id == crs.id &&
                           (it->second.both_branches || it->second.branch == branch);
        if (decryptable) {
            cts_.emplace(ct, CtInfo{pk, branch, message});
        }
        return ct;
    }

    Bytes dec(const DmeCrs& crs, const Bytes& sk, const Bytes& ct) const {
        require_crs(crs.id);
        auto skit = sks_.find(sk);
        if (skit == sks_.end()) throw DmeDecryptError("dec: unknown secret key");
        auto ctit = cts_.find(ct);
        if (ctit == cts_.end()) throw DmeDecryptError("dec: messy ciphertext");
        if (ctit->second.pk != skit->second.pk || ctit->second.branch != skit->second.branch) {
            throw DmeDecryptError("dec: messy ciphertext");
        }
        return ctit->second.message;
    }

    /// 1 - sigma for registered keys, branch 1 for unregistered ones.
    int find_messy(const DmeTrapdoor& td, const Bytes& pk) const {
        require_crs(td.crs_id);
        if (td.mode != DmeMode::messy) throw std::invalid_argument("find_messy: needs a messy-mode trapdoor");
        auto it = keys_.find(pk);
        if (it == keys_.end() || it->second.crs_id != td.crs_id || it->second.both_branches) return 1;
        return 1 - it->second.branch;
    }

    DmeMode mode_of(const DmeCrs& crs) const {
        auto it = crs_.find(crs.id);
        if (it == crs_.end()) throw std::invalid_argument("unknown crs");
        return it->second;
    }

  private:
    struct KeyInfo {
        Bytes crs_id;
        int branch;
        bool both_branches;
    };
    struct SkInfo {
        Bytes pk;
        int branch;
    };
    struct CtInfo {
        Bytes pk;
        int branch;
        Bytes message;
    };

    void require_crs(const Bytes& id) const {
        if (crs_.find(id) == crs_.end()) throw std::invalid_argument("unknown crs");
    }

    std::map<Bytes, DmeMode> crs_;
    std::map<Bytes, KeyInfo> keys_;
    std::map<Bytes, SkInfo> sks_;
    std::map<Bytes, CtInfo> cts_;
};

// ---------------------------------------------------------------------------
// 1-out-of-n and k-out-of-n oblivious transfer
// ---------------------------------------------------------------------------

enum class OtMode { binding, hiding };

inline DmeMode dme_mode_for(OtMode mode) {
    return mode == OtMode::binding ? DmeMode::dec : DmeMode::messy;
}

/// Receiver branch layout. prefix_ones is the chain-consistent convention
/// (ones strictly before the chosen index); chosen_slot_one marks only the
/// chosen index and does not telescope.
enum class BranchConvention { prefix_ones, chosen_slot_one };

/// Extractor target. first_messy_one matches prefix_ones receivers (the
/// chosen slot is the first whose messy branch is 1, i.e. the first
/// branch-0 key).
enum class OpenRecConvention { first_messy_one, first_messy_zero };

struct Ot1Copy {
    std::vector<Bytes> pks;
};

struct OtStCopy {
    int j = 1;  // 1-based chosen index
    std::vector<int> sigma;
    std::vector<Bytes> sks;
};

struct Ot2Copy {
    std::vector<std::array<Bytes, 2>> cts;  // [i][branch]
};

inline std::pair<Ot1Copy, OtStCopy> ot1n_receiver(DmeWorld& world, const DmeCrs& crs, int n, int j,
                                                  Rng& rng,
                                                  BranchConvention conv = BranchConvention::prefix_ones) {
    if (n < 1 || j < 1 || j > n) throw std::invalid_argument("ot1n_receiver: need 1 <= j <= n");
    Ot1Copy ot1;
    OtStCopy st;
    st.j = j;
    for (int i = 1; i <= n; ++i) {
        int sigma = conv == BranchConvention::prefix_ones ? (i < j ? 1 : 0) : (i == j ? 1 : 0);
        auto [pk, sk] = world.keygen(crs, sigma, rng);
        ot1.pks.push_back(std::move(pk));
        st.sigma.push_back(sigma);
        st.sks.push_back(std::move(sk));
    }
    return {std::move(ot1), std::move(st)};
}

/// Masked chain: mu'_{i,0} = mu_i ^ r_{i-1}, mu'_{i,1} = r_i ^ r_{i-1},
/// r_0 = 0. Each share is encrypted under the matching branch of pk_i.
inline Ot2Copy ot1n_sender(DmeWorld& world, const DmeCrs& crs, const Ot1Copy& ot1,
                           const std::vector<Bytes>& payloads, Rng& rng) {
    const int n = static_cast<int>(ot1.pks.size());
    if (static_cast<int>(payloads.size()) != n) throw std::invalid_argument("ot1n_sender: payload count mismatch");
    const std::size_t len = payloads.empty() ? 0 : payloads[0].size();
    for (const auto& p : payloads) {
        if (p.size() != len) throw std::invalid_argument("ot1n_sender: payload lengths differ");
    }
    std::vector<Bytes> r(static_cast<std::size_t>(n) + 1);
    r[0] = Bytes(len, 0);
    for (int i = 1; i <= n; ++i) r[static_cast<std::size_t>(i)] = rand_bytes(rng, len);
    auto xored = [&](const Bytes& a, const Bytes& b) {
        Bytes out(a.size());
        for (std::size_t k = 0; k < a.size(); ++k) out[k] = a[k] ^ b[k];
        return out;
    };
    Ot2Copy ot2;
    for (int i = 1; i <= n; ++i) {
        Bytes share0 = xored(payloads[static_cast<std::size_t>(i - 1)], r[static_cast<std::size_t>(i - 1)]);
        Bytes share1 = xored(r[static_cast<std::size_t>(i)], r[static_cast<std::size_t>(i - 1)]);
        std::array<Bytes, 2> cts;
        cts[0] = world.enc(crs, ot1.pks[static_cast<std::size_t>(i - 1)], 0, share0, rng);
        cts[1] = world.enc(crs, ot1.pks[static_cast<std::size_t>(i - 1)], 1, share1, rng);
        ot2.cts.push_back(std::move(cts));
    }
    return ot2;
}

/// XOR of the first j decrypted shares telescopes to mu_j.
inline Bytes ot1n_derive(DmeWorld& world, const DmeCrs& crs, const OtStCopy& st, const Ot2Copy& ot2) {
    if (ot2.cts.size() != st.sks.size()) throw std::invalid_argument("ot1n_derive: message shape mismatch");
    Bytes acc;
    for (int i = 1; i <= st.j; ++i) {
        const std::size_t iu = static_cast<std::size_t>(i - 1);
        Bytes share = world.dec(crs, st.sks[iu],
                                ot2.cts[iu][static_cast<std::size_t>(st.sigma[iu])]);
        if (acc.empty()) {
            acc = std::move(share);
        } else {
            if (share.size() != acc.size()) throw std::invalid_argument("ot1n_derive: share length mismatch");
            for (std::size_t k = 0; k < acc.size(); ++k) acc[k] ^= share[k];
        }
    }
    return acc;
}

struct OpenedIndex {
    int j = 1;
    bool flagged = false;  // no admissible index; fallback j = n
};

inline OpenedIndex ot_open_rec1(const DmeWorld& world, const DmeTrapdoor& td, const Ot1Copy& ot1,
                                OpenRecConvention conv = OpenRecConvention::first_messy_one) {
    const int n = static_cast<int>(ot1.pks.size());
    const int target = conv == OpenRecConvention::first_messy_one ? 1 : 0;
    for (int i = 1; i <= n; ++i) {
        if (world.find_messy(td, ot1.pks[static_cast<std::size_t>(i - 1)]) == target) {
            return {i, false};
        }
    }
    return {n, true};
}

struct Ot1 {
    std::vector<Ot1Copy> copies;
};
struct OtSt {
    std::vector<OtStCopy> copies;
};
struct Ot2 {
    std::vector<Ot2Copy> copies;
};

inline std::pair<Ot1, OtSt> otkn_receiver(DmeWorld& world, const DmeCrs& crs, int n,
                                          const std::vector<int>& j_list, Rng& rng,
                                          BranchConvention conv = BranchConvention::prefix_ones) {
    Ot1 ot1;
    OtSt st;
    for (int j : j_list) {
        auto [c1, cst] = ot1n_receiver(world, crs, n, j, rng, conv);
        ot1.copies.push_back(std::move(c1));
        st.copies.push_back(std::move(cst));
    }
    return {std::move(ot1), std::move(st)};
}

inline Ot2 otkn_sender(DmeWorld& world, const DmeCrs& crs, const Ot1& ot1,
                       const std::vector<Bytes>& payloads, Rng& rng) {
    Ot2 ot2;
    for (std::size_t c = 0; c < ot1.copies.size(); ++c) {
        try {
            ot2.copies.push_back(ot1n_sender(world, crs, ot1.copies[c], payloads, rng));
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument("copy " + std::to_string(c) + ": " + e.what());
        }
    }
    return ot2;
}

inline std::vector<Bytes> otkn_derive(DmeWorld& world, const DmeCrs& crs, const OtSt& st,
                                      const Ot2& ot2) {
    if (st.copies.size() != ot2.copies.size()) throw std::invalid_argument("otkn_derive: copy count mismatch");
    std::vector<Bytes> out;
    for (std::size_t c = 0; c < st.copies.size(); ++c) {
        try {
            out.push_back(ot1n_derive(world, crs, st.copies[c], ot2.copies[c]));
        } catch (const DmeDecryptError& e) {
            throw DmeDecryptError("copy " + std::to_string(c) + ": " + e.what());
        }
    }
    return out;
}

inline std::pair<std::vector<int>, bool> ot_open_rec(const DmeWorld& world, const DmeTrapdoor& td,
                                                     const Ot1& ot1,
                                                     OpenRecConvention conv = OpenRecConvention::first_messy_one) {
    std::vector<int> j_list;
    bool flagged = false;
    for (const auto& copy : ot1.copies) {
        OpenedIndex o = ot_open_rec1(world, td, copy, conv);
        j_list.push_back(o.j);
        flagged = flagged || o.flagged;
    }
    return {std::move(j_list), flagged};
}

/// Sender simulator: consumes only the payloads at the extracted indices,
/// filling every other slot with fresh randomness. `access_log` records
/// which payload indices came from the caller.
inline Ot2 ot_sim_sen(DmeWorld& world, const DmeCrs& crs, int n, const Ot1& ot1,
                      const std::vector<int>& j_list, const std::vector<Bytes>& payloads_at_j,
                      Rng& rng, std::vector<int>* access_log = nullptr) {
    if (j_list.size() != ot1.copies.size() || payloads_at_j.size() != j_list.size()) {
        throw std::invalid_argument("ot_sim_sen: shape mismatch");
    }
    Ot2 ot2;
    for (std::size_t c = 0; c < ot1.copies.size(); ++c) {
        const std::size_t len = payloads_at_j[c].size();
        std::vector<Bytes> payloads(static_cast<std::size_t>(n));
        for (int i = 1; i <= n; ++i) payloads[static_cast<std::size_t>(i - 1)] = rand_bytes(rng, len);
        payloads[static_cast<std::size_t>(j_list[c] - 1)] = payloads_at_j[c];
        if (access_log) access_log->push_back(j_list[c]);
        ot2.copies.push_back(ot1n_sender(world, crs, ot1.copies[c], payloads, rng));
    }
    return ot2;
}

// ---------------------------------------------------------------------------
// the dual-mode CV-NIZK
// ---------------------------------------------------------------------------

enum class DmMode { binding, hiding };

struct DmCrs {
    DmMode mode = DmMode::binding;
    DmeCrs ot_crs;
    LePublicKey le_pk;
};

struct DmTrapdoor {
    DmeTrapdoor ot_td;
};

struct DmProvingKey {
    QuantumState rho_p;
    Ot1 ot1;
};

struct DmVerificationKey {
    DmMode mode = DmMode::binding;
    std::vector<PauliBasis> w;
    Bits m;
    std::vector<int> s_v;  // ascending, 0-based qubit indices
    OtSt st;
};

struct DmProof {
    Bits x;
    Bits z;
    std::vector<LeCiphertext> ct;
    Ot2 ot2;
};

constexpr int kDmOtArity = 5;

/// binding: decryption-mode OT crs + injective encryption key (the secret
/// key is discarded; verification only re-encrypts).
/// hiding: messy-mode OT crs + lossy key.
inline DmCrs dm_crsgen(DmeWorld& world, DmMode mode, Rng& rng) {
    DmCrs crs;
    crs.mode = mode;
    crs.ot_crs = world.setup(mode == DmMode::binding ? DmeMode::dec : DmeMode::messy, rng).first;
    crs.le_pk = mode == DmMode::binding ? le_inj_gen(rng).pk : le_lossy_gen(rng);
    return crs;
}

/// Simulator CRS: hiding-shaped, with the messy trapdoor kept.
inline std::pair<DmCrs, DmTrapdoor> dm_sim0(DmeWorld& world, Rng& rng) {
    DmCrs crs;
    crs.mode = DmMode::hiding;
    auto [ot_crs, td] = world.setup(DmeMode::messy, rng);
    crs.ot_crs = ot_crs;
    crs.le_pk = le_lossy_gen(rng);
    return {std::move(crs), DmTrapdoor{td}};
}

/// J is S_V in ascending order (1-based), padded to arity 5 by repeating the
/// largest element.
inline std::vector<int> dm_choice_list(const std::vector<int>& s_v) {
    std::vector<int> j_list;
    for (int q : s_v) j_list.push_back(q + 1);
    while (static_cast<int>(j_list.size()) < kDmOtArity) j_list.push_back(j_list.back());
    return j_list;
}

inline std::pair<DmProvingKey, DmVerificationKey> dm_preprocess(DmeWorld& world, const DmCrs& crs,
                                                                int n, Rng& rng) {
    if (n < 1) throw std::invalid_argument("dm_preprocess: n must be >= 1");
    std::vector<PauliBasis> w(static_cast<std::size_t>(n));
    for (auto& b : w) b = static_cast<PauliBasis>(rand_below(rng, 3));
    Bits m = rand_bits(rng, static_cast<std::size_t>(n));
    std::vector<int> s_v = random_admissible_subset(n, rng);
    auto [ot1, st] = otkn_receiver(world, crs.ot_crs, n, dm_choice_list(s_v), rng);
    DmProvingKey kp{prepare_pauli_product(w, m), std::move(ot1)};
    DmVerificationKey kv{crs.mode, std::move(w), std::move(m), std::move(s_v), std::move(st)};
    return {std::move(kp), std::move(kv)};
}

namespace detail {

inline Bytes ot_payload(std::uint8_t pad_bits, const LeRandomness& r) {
    Bytes out;
    out.push_back(pad_bits);
    out.insert(out.end(), r.begin(), r.end());
    return out;
}

inline std::pair<std::uint8_t, LeRandomness> parse_ot_payload(const Bytes& payload) {
    if (payload.size() != 1 + kLeRandomnessBytes) {
        throw std::invalid_argument("ot payload has wrong length");
    }
    LeRandomness r{};
    std::copy(payload.begin() + 1, payload.end(), r.begin());
    return {payload[0], r};
}

}  // namespace detail

inline DmProof dm_prove_with_state(DmeWorld& world, const DmCrs& crs, const DmProvingKey& kp,
                                   const QuantumState& state, Rng& rng) {
    const int n = state.num_qubits();
    PauliFrame pad = PauliFrame::random(static_cast<std::size_t>(n), rng);
    QuantumState framed = apply_pauli_frame(state, pad);
    qsp::QspProof xz = qsp::teleport_against(framed, kp.rho_p, rng);

    DmProof proof;
    proof.x = xz.x;
    proof.z = xz.z;
    std::vector<Bytes> payloads;
    for (int j = 0; j < n; ++j) {
        auto ju = static_cast<std::size_t>(j);
        std::uint8_t bits = static_cast<std::uint8_t>((pad.x[ju] & 1) | ((pad.z[ju] & 1) << 1));
        LeRandomness coins = le_random_coins(rng);
        proof.ct.push_back(le_enc(crs.le_pk, bits, coins));
        payloads.push_back(detail::ot_payload(bits, coins));
    }
    proof.ot2 = otkn_sender(world, crs.ot_crs, kp.ot1, payloads, rng);
    return proof;
}

inline DmProof dm_prove(DmeWorld& world, const DmCrs& crs, const DmProvingKey& kp,
                        const ham::Instance& inst, Rng& rng) {
    if (!inst.witness.has_value()) throw std::invalid_argument("dm_prove: missing witness");
    return dm_prove_with_state(world, crs, kp, *inst.witness, rng);
}

struct DmVerdict {
    bool accept = false;
    std::string reason;  // set on rejection paths that carry one
};

/// Derives the five openings, re-encrypts each probed slot against the
/// transmitted ciphertext, reconstructs the pads on S_V, then runs the
/// QSP acceptance rule unchanged.
inline DmVerdict dm_verify(DmeWorld& world, const DmCrs& crs, const DmVerificationKey& kv,
                           const ham::Instance& inst, const DmProof& proof, Rng& rng,
                           const qsp::VerifyOptions& opts = {}) {
    if (crs.mode != kv.mode) {
        throw std::invalid_argument("dm_verify: crs mode does not match the verification key mode");
    }
    const auto& h = inst.hamiltonian;
    const std::size_t n = static_cast<std::size_t>(h.num_qubits);
    if (proof.x.size() != n || proof.z.size() != n || proof.ct.size() != n) {
        throw std::invalid_argument("dm_verify: malformed proof");
    }
    std::vector<Bytes> derived;
    try {
        derived = otkn_derive(world, crs.ot_crs, kv.st, proof.ot2);
    } catch (const DmeDecryptError& e) {
        return {false, std::string("ot derive failure: ") + e.what()};
    }
    std::map<int, qsp::PadBit> pads;
    for (std::size_t i = 0; i < kv.s_v.size(); ++i) {
        int j = kv.s_v[i];
        std::uint8_t bits;
        LeRandomness coins;
        try {
            std::tie(bits, coins) = detail::parse_ot_payload(derived[i]);
        } catch (const std::invalid_argument& e) {
            return {false, std::string("ot payload malformed: ") + e.what()};
        }
        if (le_enc(crs.le_pk, bits, coins) != proof.ct[static_cast<std::size_t>(j)]) {
            return {false, "ciphertext mismatch at probed slot " + std::to_string(j)};
        }
        pads[j] = qsp::PadBit{static_cast<std::uint8_t>(bits & 1), static_cast<std::uint8_t>((bits >> 1) & 1)};
    }

    std::size_t i = h.sample_term(rng);
    const auto& term = h.terms[i];
    if (!qsp::detail::consistent_with(term, kv.s_v, kv.w)) return {true, ""};
    if (qsp::detail::coin_heads(term.paulis.size(), rng)) return {true, ""};
    int parity = 0;
    for (const auto& [j, basis] : term.paulis) {
        const auto& pad = pads.at(j);
        int xh = opts.use_pad_bits ? pad.x : 0;
        int zh = opts.use_pad_bits ? pad.z : 0;
        parity ^= qsp::detail::corrected_bit(basis, kv.m[static_cast<std::size_t>(j)],
                                             proof.x[static_cast<std::size_t>(j)],
                                             proof.z[static_cast<std::size_t>(j)], xh, zh);
    }
    return {qsp::detail::parity_accepts(parity, term.sign), ""};
}

/// Trapdoor simulator: extracts S_V from ot1, teleports the padded local
/// density matrix on S_V (the rest of the register behaves maximally
/// mixed, so those outcomes are uniform), encrypts pads for every slot
/// under the lossy key, and answers the OT through the sender simulator.
inline DmProof dm_simulate(DmeWorld& world, const DmCrs& crs, const DmTrapdoor& td,
                           const DmProvingKey& kp, const ham::Instance& inst, Rng& rng,
                           bool* extractor_flagged = nullptr,
                           std::vector<int>* payload_access_log = nullptr) {
    const int n = inst.num_qubits();
    auto [j_list, flagged] = ot_open_rec(world, td.ot_td, kp.ot1);
    if (extractor_flagged) *extractor_flagged = flagged;
    std::vector<int> s_v;
    for (int j : j_list) s_v.push_back(j - 1);
    std::sort(s_v.begin(), s_v.end());
    s_v.erase(std::unique(s_v.begin(), s_v.end()), s_v.end());

    PauliFrame pad = PauliFrame::random(static_cast<std::size_t>(n), rng);
    DmProof proof;
    proof.x.assign(static_cast<std::size_t>(n), 0);
    proof.z.assign(static_cast<std::size_t>(n), 0);

    // Bell statistics on S_V pairs from the padded local density matrix
    // against the reduced key state; uniform outcomes elsewhere.
    const int k = static_cast<int>(s_v.size());
    DensityMatrix rho_s = ham::sim_hist(inst, s_v);
    PauliFrame pad_s = PauliFrame::zero(static_cast<std::size_t>(k));
    for (int t = 0; t < k; ++t) {
        pad_s.x[static_cast<std::size_t>(t)] = pad.x[static_cast<std::size_t>(s_v[static_cast<std::size_t>(t)])];
        pad_s.z[static_cast<std::size_t>(t)] = pad.z[static_cast<std::size_t>(s_v[static_cast<std::size_t>(t)])];
    }
    apply_pauli_frame_in_place(rho_s, pad_s);
    DensityMatrix joint = rho_s.tensor(partial_trace(kp.rho_p, s_v));
    std::vector<std::pair<int, int>> bell_pairs;
    for (int t = 0; t < k; ++t) bell_pairs.emplace_back(t, k + t);
    auto table = bell_outcome_distribution(joint, bell_pairs);
    std::size_t outcome = sample_from_table(table, rng);
    for (int t = 0; t < k; ++t) {
        int j = s_v[static_cast<std::size_t>(t)];
        proof.x[static_cast<std::size_t>(j)] = (outcome >> (2 * t)) & 1;
        proof.z[static_cast<std::size_t>(j)] = (outcome >> (2 * t + 1)) & 1;
    }
    for (int j = 0; j < n; ++j) {
        if (std::binary_search(s_v.begin(), s_v.end(), j)) continue;
        proof.x[static_cast<std::size_t>(j)] = static_cast<std::uint8_t>(rand_bit(rng));
        proof.z[static_cast<std::size_t>(j)] = static_cast<std::uint8_t>(rand_bit(rng));
    }

    std::vector<Bytes> payloads_at_j;
    std::vector<LeRandomness> coins(static_cast<std::size_t>(n));
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        auto ju = static_cast<std::size_t>(j);
        bits[ju] = static_cast<std::uint8_t>((pad.x[ju] & 1) | ((pad.z[ju] & 1) << 1));
        coins[ju] = le_random_coins(rng);
        proof.ct.push_back(le_enc(crs.le_pk, bits[ju], coins[ju]));
    }
    for (int j1 : j_list) {
        auto ju = static_cast<std::size_t>(j1 - 1);
        payloads_at_j.push_back(detail::ot_payload(bits[ju], coins[ju]));
    }
    proof.ot2 = ot_sim_sen(world, crs.ot_crs, n, kp.ot1, j_list, payloads_at_j, rng,
                           payload_access_log);
    return proof;
}

// ---------------------------------------------------------------------------
// serialization
// ---------------------------------------------------------------------------

inline Bytes ot2_bytes(const Ot2& ot2) {
    Bytes out;
    append_u32(out, static_cast<std::uint32_t>(ot2.copies.size()));
    for (const auto& copy : ot2.copies) {
        append_u32(out, static_cast<std::uint32_t>(copy.cts.size()));
        for (const auto& slot : copy.cts) {
            append_bytes(out, slot[0]);
            append_bytes(out, slot[1]);
        }
    }
    return out;
}

inline nlohmann::ordered_json dm_proof_to_json(const DmProof& p) {
    nlohmann::ordered_json j;
    j["x"] = to_hex(pack_bits(p.x));
    j["z"] = to_hex(pack_bits(p.z));
    j["ct"] = nlohmann::ordered_json::array();
    for (const auto& ct : p.ct) j["ct"].push_back(to_base64(le_ciphertext_bytes(ct)));
    j["ot2"] = to_base64(ot2_bytes(p.ot2));
    return j;
}

inline nlohmann::ordered_json dm_crs_to_json(const DmCrs& crs) {
    nlohmann::ordered_json j;
    j["mode"] = crs.mode == DmMode::binding ? "binding" : "hiding";
    j["ot_crs"] = to_hex(crs.ot_crs.id);
    j["le_pk"] = to_base64(le_public_key_bytes(crs.le_pk));
    return j;
}

}  // namespace qmanizk::dm
