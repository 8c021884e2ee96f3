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

// End-to-end acceptance gate. Every check here pins the finite-size law it
// verifies and its tolerance in code; one summary line prints per criterion.

#include <gtest/gtest.h>

#include <chrono>
#include <iostream>

#include "qmanizk/dual_mode.hpp"
#include "qmanizk/fiat_shamir.hpp"
#include "qmanizk/lemma_suites.hpp"
#include "qmanizk/protocol_qsp.hpp"

using namespace qmanizk;

namespace {

class Criterion {
  public:
    Criterion(int number, std::string what) : number_(number), what_(std::move(what)) {
        start_ = std::chrono::steady_clock::now();
    }
    ~Criterion() {
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        bool ok = !::testing::Test::HasFailure();
        std::cout << "CRITERION " << number_ << ": " << (ok ? "PASS" : "FAIL") << "  " << what_
                  << "  [" << secs << " s]" << std::endl;
    }

  private:
    int number_;
    std::string what_;
    std::chrono::steady_clock::time_point start_;
};

double rate(std::uint64_t trials, std::uint64_t seed, const std::function<bool(Rng&)>& run) {
    std::uint64_t ok = run_trials(trials, seed, [&](Rng& rng, std::uint64_t) { return run(rng); });
    return static_cast<double>(ok) / static_cast<double>(trials);
}

const ham::Instance& bell_yes() {
    static const ham::Instance inst = ham::make_handcrafted_instance("bell_stabilizer_yes", 2);
    return inst;
}

const ham::Instance& anti_no() {
    static const ham::Instance inst = ham::make_handcrafted_instance("anti_stabilizer_no", 2);
    return inst;
}

}  // namespace

TEST(Acceptance, C01_CompletenessLaw) {
    Criterion c(1, "honest QSP acceptance = 1 - alpha/N' (alpha = 0, N' = 729) at 1e5 trials");
    const std::uint64_t trials = 100000;
    const ham::Instance& inst = bell_yes();
    ASSERT_NEAR(inst.hamiltonian.alpha, 0.0, 1e-12);
    std::uint64_t accepts = run_trials(trials, 101, [&](Rng& rng, std::uint64_t) {
        auto keys = qsp::setup(2, rng);
        auto proof = qsp::prove(keys.proving, inst, rng);
        return qsp::verify(keys.verification, inst, proof, rng).first;
    });
    double p_hat = static_cast<double>(accepts) / static_cast<double>(trials);
    double target = 1.0 - 0.0 / 729.0;
    // the binomial sigma is 0 at the law's value, so the band collapses
    EXPECT_EQ(accepts, trials) << "p_hat = " << p_hat << ", target " << target;
}

TEST(Acceptance, C02_SoundnessWitness) {
    Criterion c(2, "ground-state cheat acceptance tracks 1 - lambda_min/N' (lambda_min = 0.5)");
    const std::uint64_t trials = 100000;
    const ham::Instance& inst = anti_no();
    auto [lambda, ground] = ham::ground_state(inst.hamiltonian);
    ASSERT_NEAR(lambda, 0.5, 1e-9);
    const double exact = qsp::acceptance_probability_exact(inst, ground);
    ASSERT_NEAR(exact, 1.0 - 0.5 / 729.0, 1e-12);
    double p_hat = rate(trials, 102, [&](Rng& rng) {
        auto keys = qsp::setup(2, rng);
        auto proof = qsp::cheat_prove_optimal(keys.proving, inst, rng);
        return qsp::verify(keys.verification, inst, proof, rng).first;
    });
    double sigma = std::sqrt(exact * (1 - exact) / static_cast<double>(trials));
    EXPECT_LE(p_hat, 1.0 - 0.5 / 729.0 + 4 * sigma);
    EXPECT_LE(std::abs(p_hat - exact), 4 * sigma) << "p_hat " << p_hat << " exact " << exact;
}

TEST(Acceptance, C03_EnergyTestExactness) {
    Criterion c(3, "enumerated posthoc acceptance equals 1 - Tr(rho H) within 1e-9, 20 random cases");
    Rng rng = make_rng(103);
    double worst = 0;
    for (int rep = 0; rep < 20; ++rep) {
        int n = 1 + static_cast<int>(rand_below(rng, 3));
        auto psi = random_state(n, rng);
        auto h = suites::random_hamiltonian(n, 2 + static_cast<int>(rand_below(rng, 3)), rng);
        worst = std::max(worst,
                         std::abs(qsp::energy_test_acceptance_exact(psi, h) - (1.0 - ham::energy(psi, h))));
    }
    EXPECT_LE(worst, 1e-9) << "worst deviation " << worst;
}

TEST(Acceptance, C04_QuantumLemmaSuites) {
    Criterion c(4, "teleportation, Pauli mixing, state collapsing, XZ-before-measurement suites");
    for (const auto& r : suites::suite_teleport(104)) EXPECT_TRUE(r.pass) << r.name << ": " << r.detail;
    for (const auto& r : suites::suite_mixing(104)) EXPECT_TRUE(r.pass) << r.name << ": " << r.detail;
    for (const auto& r : suites::suite_xz(104)) EXPECT_TRUE(r.pass) << r.name << ": " << r.detail;
}

TEST(Acceptance, C05_VirtualProtocolEquivalence) {
    Criterion c(5, "original vs virtual-1 vs virtual-2 acceptance agree within 4 sigma at 1e5 trials");
    const std::uint64_t trials = 100000;
    struct Row {
        const ham::Instance* inst;
        qsp::ProverStrategy strat;
        double law;
        const char* name;
    };
    auto [lambda, ground] = ham::ground_state(anti_no().hamiltonian);
    (void)ground;
    std::vector<Row> rows;
    rows.push_back({&bell_yes(), qsp::honest_strategy(), 1.0, "honest"});
    rows.push_back({&anti_no(), qsp::ground_state_strategy(), 1.0 - lambda / 729.0, "ground"});
    int salt = 0;
    for (auto& row : rows) {
        double p0 = rate(trials, 500 + salt, [&](Rng& rng) { return qsp::run_original(*row.inst, row.strat, rng); });
        double p1 = rate(trials, 600 + salt, [&](Rng& rng) { return qsp::virtual1_run(*row.inst, row.strat, rng); });
        double p2 = rate(trials, 700 + salt, [&](Rng& rng) { return qsp::virtual2_run(*row.inst, row.strat, rng); });
        double var = std::max(row.law * (1 - row.law), 1e-9);
        double sigma2 = std::sqrt(2 * var / static_cast<double>(trials));
        EXPECT_LE(std::abs(p0 - p1), 4 * sigma2) << row.name << " original vs v1: " << p0 << " / " << p1;
        EXPECT_LE(std::abs(p0 - p2), 4 * sigma2) << row.name << " original vs v2: " << p0 << " / " << p2;
        ++salt;
    }
}

TEST(Acceptance, C06_ZeroKnowledgeExact) {
    Criterion c(6, "prove vs simulate transcript TV <= 1e-6 by enumeration at N = 3; off-key bits uniform");
    for (const auto& r : suites::suite_zk(106)) EXPECT_TRUE(r.pass) << r.name << ": " << r.detail;
}

TEST(Acceptance, C07_SigmaFsCompleteness) {
    Criterion c(7, "Sigma and FS agree and meet 1 - alpha/N'; tampering rejects 1e4/1e4; 32-bit control collides");
    const ham::Instance& inst = bell_yes();
    const std::uint64_t trials = 100000;
    double sigma_rate = rate(trials, 107, [&](Rng& rng) {
        fs::ProgrammableOracle ro(rand_u64(rng));
        auto keys = fs::sigma_preprocess(2, rng);
        return fs::sigma_run(keys, inst, *inst.witness, ro, rng);
    });
    double fs_rate = rate(trials, 108, [&](Rng& rng) {
        fs::ProgrammableOracle ro(rand_u64(rng));
        auto keys = fs::sigma_preprocess(2, rng);
        Bytes id{'c', '7'};
        auto proof = fs::fs_prove(keys.rho_p, inst, id, ro, rng);
        return fs::fs_verify(keys.verification, inst, id, proof, ro, rng);
    });
    // alpha = 0 pins both laws at exactly 1
    EXPECT_DOUBLE_EQ(sigma_rate, 1.0);
    EXPECT_DOUBLE_EQ(fs_rate, 1.0);

    std::uint64_t rejected = 0;
    const std::uint64_t tamper_attempts = 10000;
    for (std::uint64_t t = 0; t < tamper_attempts; ++t) {
        Rng rng = derive_rng(109, t);
        fs::ProgrammableOracle ro(rand_u64(rng));
        auto keys = fs::sigma_preprocess(2, rng);
        Bytes id{'c', '7'};
        auto proof = fs::fs_prove(keys.rho_p, inst, id, ro, rng);
        auto& slot = proof.msg3.opened[t % proof.msg3.opened.size()];
        if (t % 2 == 0) {
            slot.x ^= 1;  // opened bit
        } else {
            slot.r[t % slot.r.size()] ^= 0x40;  // decommitment randomness
        }
        if (!fs::fs_verify(keys.verification, inst, id, proof, ro, rng)) ++rejected;
    }
    EXPECT_EQ(rejected, tamper_attempts);

    // 32-bit truncated-oracle positive control: a binding break exists
    fs::ProgrammableOracle ro32(110, 32);
    Rng rng = make_rng(111);
    std::map<Bytes, Bytes> seen;  // com -> message
    bool collision = false;
    for (int i = 0; i < 1000000 && !collision; ++i) {
        Bytes msg = rand_bytes(rng, 2);
        Bytes r = rand_bytes(rng, fs::kCommitRandomnessBytes);
        Bytes com = ro32.query(fs::detail::commit_input(msg, r));
        auto it = seen.find(com);
        if (it != seen.end() && it->second != msg) collision = true;
        seen.emplace(std::move(com), std::move(msg));
    }
    EXPECT_TRUE(collision);
}

TEST(Acceptance, C08_FsSimulator) {
    Criterion c(8, "simulated FS proofs verify at the honest rate with exactly one reprogrammed point; opened TV <= 1e-6");
    const ham::Instance& inst = bell_yes();
    const std::uint64_t trials = 10000;
    std::uint64_t good = run_trials(trials, 112, [&](Rng& rng, std::uint64_t) {
        fs::ProgrammableOracle ro(rand_u64(rng));
        auto keys = fs::sigma_preprocess(2, rng);
        Bytes id{'c', '8'};
        auto proof = fs::fs_simulate(keys.rho_p, inst, id, ro, rng);
        bool ok = fs::fs_verify(keys.verification, inst, id, proof, ro, rng);
        return ok && ro.reprogram_count() == 1;
    });
    EXPECT_EQ(good, trials);  // honest rate is exactly 1 on the alpha = 0 instance

    // opened-slot distribution equals the honest marginal, by enumeration
    auto ghz = ham::make_handcrafted_instance("ghz_yes", 3);
    Rng krng = make_rng(113);
    auto keys = fs::sigma_preprocess(3, krng);
    auto honest_table = bell_outcome_distribution(ghz.witness->tensor(keys.rho_p),
                                                  {{0, 3}, {1, 4}, {2, 5}});
    double worst_tv = 0;
    for (const std::vector<int>& s : {std::vector<int>{1}, {0, 2}, {0, 1, 2}}) {
        const int k = static_cast<int>(s.size());
        std::vector<double> honest(std::size_t{1} << (2 * k), 0.0);
        for (std::size_t idx = 0; idx < honest_table.size(); ++idx) {
            std::size_t key = 0;
            for (int t = 0; t < k; ++t) {
                int j = s[static_cast<std::size_t>(t)];
                key |= (((idx >> (2 * j)) & 1) | (((idx >> (2 * j + 1)) & 1) << 1)) << (2 * t);
            }
            honest[key] += honest_table[idx];
        }
        DensityMatrix joint = ham::sim_hist(ghz, s).tensor(partial_trace(keys.rho_p, s));
        std::vector<std::pair<int, int>> pairs;
        for (int t = 0; t < k; ++t) pairs.emplace_back(t, k + t);
        worst_tv = std::max(worst_tv, total_variation(honest, bell_outcome_distribution(joint, pairs)));
    }
    EXPECT_LE(worst_tv, 1e-6) << "worst opened-slot TV " << worst_tv;
}

TEST(Acceptance, C09_OtCorrectness) {
    Criterion c(9, "1-of-n (n <= 4) and 5-of-8-range OT sweeps exact, extractor recovers J, 100 payloads each");
    // 1-of-n, both modes, 100 random payload vectors per (n, j)
    bool derive_ok = true, extract_ok = true;
    for (dm::DmeMode mode : {dm::DmeMode::dec, dm::DmeMode::messy}) {
        dm::DmeWorld world;
        Rng rng = make_rng(114 + static_cast<int>(mode));
        auto [crs, td] = world.setup(mode, rng);
        for (int n = 1; n <= 4; ++n) {
            for (int j = 1; j <= n; ++j) {
                for (int rep = 0; rep < 100; ++rep) {
                    std::vector<Bytes> mus;
                    for (int i = 0; i < n; ++i) mus.push_back(rand_bytes(rng, 16));
                    auto [ot1, st] = dm::ot1n_receiver(world, crs, n, j, rng);
                    auto ot2 = dm::ot1n_sender(world, crs, ot1, mus, rng);
                    derive_ok = derive_ok &&
                                dm::ot1n_derive(world, crs, st, ot2) == mus[static_cast<std::size_t>(j - 1)];
                    if (mode == dm::DmeMode::messy) {
                        auto op = dm::ot_open_rec1(world, td, ot1);
                        extract_ok = extract_ok && op.j == j && !op.flagged;
                    }
                }
            }
        }
    }
    EXPECT_TRUE(derive_ok);
    EXPECT_TRUE(extract_ok);

    // k-of-n up to (5, 8), 100 random payload vectors per (n, k)
    bool kn_ok = true;
    dm::DmeWorld world;
    Rng rng = make_rng(115);
    auto [crs, td] = world.setup(dm::DmeMode::messy, rng);
    for (int n = 2; n <= 8; ++n) {
        for (int k = 1; k <= 5; ++k) {
            for (int rep = 0; rep < 100; ++rep) {
                std::vector<int> j_list;
                for (int u = 0; u < k; ++u) {
                    j_list.push_back(1 + static_cast<int>(rand_below(rng, static_cast<std::uint64_t>(n))));
                }
                std::vector<Bytes> mus;
                for (int i = 0; i < n; ++i) mus.push_back(rand_bytes(rng, 8));
                auto [ot1, st] = dm::otkn_receiver(world, crs, n, j_list, rng);
                auto ot2 = dm::otkn_sender(world, crs, ot1, mus, rng);
                auto got = dm::otkn_derive(world, crs, st, ot2);
                for (int u = 0; u < k; ++u) {
                    kn_ok = kn_ok && got[static_cast<std::size_t>(u)] ==
                                         mus[static_cast<std::size_t>(j_list[static_cast<std::size_t>(u)] - 1)];
                }
                auto [opened, flagged] = dm::ot_open_rec(world, td, ot1);
                kn_ok = kn_ok && !flagged && opened == j_list;
            }
        }
    }
    EXPECT_TRUE(kn_ok);
}

TEST(Acceptance, C10_DualModeCompletenessAndBinding) {
    Criterion c(10, "binding-mode completeness matches 1 - alpha/N'; probed payload/ct mismatches always reject");
    auto inst = ham::pad_instance(bell_yes(), 5);
    const std::uint64_t trials = 100000;
    std::uint64_t accepts = run_trials(trials, 116, [&](Rng& rng, std::uint64_t) {
        dm::DmeWorld world;
        auto crs = dm::dm_crsgen(world, dm::DmMode::binding, rng);
        auto [kp, kv] = dm::dm_preprocess(world, crs, 5, rng);
        auto proof = dm::dm_prove(world, crs, kp, inst, rng);
        return dm::dm_verify(world, crs, kv, inst, proof, rng).accept;
    });
    EXPECT_EQ(accepts, trials);  // alpha = 0 law

    // re-encryption binding, forced S_V, all four pad values
    Rng rng = make_rng(117);
    dm::DmeWorld world;
    auto crs = dm::dm_crsgen(world, dm::DmMode::binding, rng);
    for (std::uint8_t pad = 0; pad < 4; ++pad) {
        auto coins = dm::le_random_coins(rng);
        auto ct = dm::le_enc(crs.le_pk, pad, coins);
        for (std::uint8_t other = 0; other < 4; ++other) {
            if (other != pad) EXPECT_TRUE(dm::le_enc(crs.le_pk, other, coins) != ct);
        }
    }
    int rejections = 0;
    for (int rep = 0; rep < 40; ++rep) {
        Rng rr = derive_rng(118, static_cast<std::uint64_t>(rep));
        std::vector<PauliBasis> w(5);
        for (auto& b : w) b = static_cast<PauliBasis>(rand_below(rr, 3));
        Bits m = rand_bits(rr, 5);
        std::vector<int> s_v{0, 1};
        auto [ot1, st] = dm::otkn_receiver(world, crs.ot_crs, 5, dm::dm_choice_list(s_v), rr);
        dm::DmProvingKey kp{prepare_pauli_product(w, m), std::move(ot1)};
        dm::DmVerificationKey kv{crs.mode, std::move(w), std::move(m), s_v, std::move(st)};
        auto proof = dm::dm_prove(world, crs, kp, inst, rr);
        proof.ct[static_cast<std::size_t>(rep % 2)].c2 = static_cast<std::uint16_t>(
            (proof.ct[static_cast<std::size_t>(rep % 2)].c2 + 1 + rep) % dm::kLeModulus);
        auto verdict = dm::dm_verify(world, crs, kv, inst, proof, rr);
        if (!verdict.accept && verdict.reason.find("ciphertext mismatch") != std::string::npos) {
            ++rejections;
        }
    }
    EXPECT_EQ(rejections, 40);
}

TEST(Acceptance, C11_Amplification) {
    Criterion c(11, "at reps with Hoeffding bound 0.01, amplified completeness and soundness errors <= 0.05");
    // Undiluted lane: the paired two-local protocol on matched (alpha, beta)
    // = (0, 0.5) instances. reps = ceil(2 ln 100 / 0.25) = 37.
    const ham::Instance& yes_inst = bell_yes();
    auto no_inst = ham::make_handcrafted_instance("anti_pair_no", 2);
    const double cc = 1.0 - yes_inst.hamiltonian.alpha;  // 1
    const double ss = 1.0 - 0.5;                         // lambda_min of the no-instance
    int reps = qsp::reps_for_hoeffding_bound(cc, ss, 0.01);
    qsp::Amplification amp{reps, cc, ss};
    ASSERT_LE(amp.hoeffding_bound(), 0.01);
    ASSERT_EQ(reps, 37);

    const std::uint64_t runs = 1000;
    std::uint64_t completeness_fails = runs - run_trials(runs, 119, [&](Rng& rng, std::uint64_t) {
        return qsp::amplified_accept(amp, [&](Rng& r) {
            auto keys = qsp::nip_setup(2, r);
            auto proof = qsp::nip_prove(keys.rho_p, yes_inst, r);
            return qsp::nip_verify(keys, yes_inst, proof, r);
        }, rng);
    });
    std::uint64_t soundness_accepts = run_trials(runs, 120, [&](Rng& rng, std::uint64_t) {
        return qsp::amplified_accept(amp, [&](Rng& r) {
            auto keys = qsp::nip_setup(2, r);
            auto proof = qsp::nip_cheat_ground(keys.rho_p, no_inst, r);
            return qsp::nip_verify(keys, no_inst, proof, r);
        }, rng);
    });
    double comp_err = static_cast<double>(completeness_fails) / static_cast<double>(runs);
    double sound_err = static_cast<double>(soundness_accepts) / static_cast<double>(runs);
    EXPECT_LE(comp_err, 0.05) << "completeness error " << comp_err;
    EXPECT_LE(sound_err, 0.05) << "soundness error " << sound_err;
}

TEST(Acceptance, C12_MutationSensitivity) {
    Criterion c(12, "dropping the pad correction or reverting the OT branch convention turns a suite red");
    suites::MutationFlags pad_bug;
    pad_bug.drop_pad_correction = true;
    bool zk_red = false;
    for (const auto& r : suites::suite_zk(121, pad_bug)) zk_red = zk_red || !r.pass;
    EXPECT_TRUE(zk_red);

    suites::MutationFlags branch_bug;
    branch_bug.literal_ot_branches = true;
    bool ot_red = false;
    for (const auto& r : suites::suite_ot(122, branch_bug)) ot_red = ot_red || !r.pass;
    EXPECT_TRUE(ot_red);

    // and the healthy configurations stay green
    bool clean = true;
    for (const auto& r : suites::suite_zk(121)) clean = clean && r.pass;
    for (const auto& r : suites::suite_ot(122)) clean = clean && r.pass;
    EXPECT_TRUE(clean);
}

int main(int argc, char** argv) {
    ::testing::InitGoogleTest(&argc, argv);
    return RUN_ALL_TESTS();
}
