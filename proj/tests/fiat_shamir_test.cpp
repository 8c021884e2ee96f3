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

#include "qmanizk/fiat_shamir.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace qmanizk;

namespace {

const Bytes kId{'t', 'e', 's', 't'};

double rate(std::uint64_t trials, std::uint64_t seed, const std::function<bool(Rng&)>& run) {
    std::uint64_t ok = run_trials(trials, seed, [&](Rng& rng, std::uint64_t) { return run(rng); });
    return static_cast<double>(ok) / static_cast<double>(trials);
}

}  // namespace

TEST(Oracle, RepeatedQueriesStable) {
    fs::ProgrammableOracle ro(123);
    Bytes in{1, 2, 3};
    auto a = ro.query(in);
    auto b = ro.query(in);
    EXPECT_EQ(a, b);
    EXPECT_EQ(ro.query_count(), 2u);
    EXPECT_EQ(a.size(), 32u);
}

TEST(Oracle, DistinctSeedsDisagree) {
    fs::ProgrammableOracle a(1), b(2);
    int disagreements = 0;
    for (int i = 0; i < 100; ++i) {
        Bytes in{static_cast<std::uint8_t>(i)};
        if (a.query(in) != b.query(in)) ++disagreements;
    }
    EXPECT_EQ(disagreements, 100);
}

TEST(Oracle, ReprogramOverridesOnePoint) {
    fs::ProgrammableOracle ro(7);
    Bytes x{9, 9}, other{8, 8};
    auto before_other = ro.query(other);
    Bytes y(32, 0xab);
    ro.reprogram(x, y);
    EXPECT_EQ(ro.query(x), y);
    EXPECT_EQ(ro.query(other), before_other);
    EXPECT_EQ(ro.reprogram_count(), 1u);
}

TEST(Commitment, RoundTripAndTamper) {
    fs::ProgrammableOracle ro(11);
    Rng rng = make_rng(1);
    Bytes msg{0x2};
    auto c = fs::commit(ro, msg, rng);
    EXPECT_TRUE(fs::verify_commit(ro, msg, c.com, c.d));
    Bytes flipped{0x3};
    EXPECT_FALSE(fs::verify_commit(ro, flipped, c.com, fs::Decommitment{flipped, c.d.randomness}));
}

TEST(Commitment, FreshRandomnessSeparatesCommitments) {
    fs::ProgrammableOracle ro(12);
    Rng rng = make_rng(2);
    std::set<Bytes> seen;
    for (int i = 0; i < 64; ++i) seen.insert(fs::commit(ro, Bytes{0x1}, rng).com);
    EXPECT_EQ(seen.size(), 64u);
}

TEST(Binding, TruncatedOracleCollidesFullWidthDoesNot) {
    // positive control at 32 bits: birthday collisions across distinct
    // messages must appear well within 10^6 attempts
    {
        fs::ProgrammableOracle ro(31, 32);
        Rng rng = make_rng(3);
        std::map<Bytes, std::pair<Bytes, Bytes>> seen;  // com -> (message, r)
        bool found = false;
        for (int i = 0; i < 1000000 && !found; ++i) {
            Bytes msg = rand_bytes(rng, 2);
            Bytes r = rand_bytes(rng, fs::kCommitRandomnessBytes);
            Bytes com = ro.query(fs::detail::commit_input(msg, r));
            auto it = seen.find(com);
            if (it != seen.end() && it->second.first != msg) {
                // confirm both openings verify
                EXPECT_TRUE(fs::verify_commit(ro, it->second.first, com,
                                              fs::Decommitment{it->second.first, it->second.second}));
                EXPECT_TRUE(fs::verify_commit(ro, msg, com, fs::Decommitment{msg, r}));
                found = true;
            }
            seen.emplace(std::move(com), std::make_pair(std::move(msg), std::move(r)));
        }
        EXPECT_TRUE(found);
    }
    // at 256 bits the same search must come up empty
    {
        fs::ProgrammableOracle ro(32, 256);
        Rng rng = make_rng(4);
        std::set<Bytes> seen;
        bool collided = false;
        for (int i = 0; i < 1000000; ++i) {
            Bytes msg = rand_bytes(rng, 2);
            Bytes r = rand_bytes(rng, fs::kCommitRandomnessBytes);
            if (!seen.insert(ro.query(fs::detail::commit_input(msg, r))).second) collided = true;
        }
        EXPECT_FALSE(collided);
    }
}

TEST(SigmaPreprocess, DeterministicAndKeyShape) {
    Rng a = make_rng(5), b = make_rng(5);
    auto ka = fs::sigma_preprocess(4, a);
    auto kb = fs::sigma_preprocess(4, b);
    EXPECT_EQ(ka.verification.w, kb.verification.w);
    EXPECT_EQ(ka.verification.m, kb.verification.m);
    EXPECT_NEAR(ka.rho_p.fidelity_with(prepare_pauli_product(ka.verification.w, ka.verification.m)),
                1.0, 1e-12);
}

TEST(SigmaProve1, CommitmentListShapeAndMinEntropy) {
    auto inst = ham::make_handcrafted_instance("bell_stabilizer_yes", 2);
    std::set<std::vector<Bytes>> firsts;
    for (int t = 0; t < 1000; ++t) {
        Rng rng = derive_rng(2001, static_cast<std::uint64_t>(t));
        fs::ProgrammableOracle ro(900 + static_cast<std::uint64_t>(t));
        auto keys = fs::sigma_preprocess(2, rng);
        auto [msg1, st] = fs::sigma_prove1(keys.rho_p, inst, ro, rng);
        EXPECT_EQ(msg1.coms.size(), 2u);
        // openings verify against the first message
        for (std::size_t j = 0; j < 2; ++j) {
            fs::Decommitment d{fs::encode_xz(st.xz.x[j], st.xz.z[j]), st.rand[j]};
            EXPECT_TRUE(fs::verify_commit(ro, d.message, msg1.coms[j], d));
        }
        firsts.insert(msg1.coms);
    }
    EXPECT_EQ(firsts.size(), 1000u);  // no msg1 collision across fresh runs
}

TEST(SigmaVerify1, SingleQubitChallengeIsForced) {
    Rng rng = make_rng(6);
    for (int t = 0; t < 16; ++t) {
        auto s = fs::sigma_verify1(1, rng);
        EXPECT_EQ(s, std::vector<int>{0});
    }
}

TEST(SigmaVerify1, SizeHistogram) {
    std::vector<std::uint64_t> counts(5, 0);
    for (int t = 0; t < 100000; ++t) {
        Rng rng = derive_rng(2002, static_cast<std::uint64_t>(t));
        ++counts[fs::sigma_verify1(7, rng).size() - 1];
    }
    std::vector<double> expect;
    double total = static_cast<double>(admissible_subset_count(7));
    for (int k = 1; k <= 5; ++k) expect.push_back(static_cast<double>(binom(7, k)) / total);
    EXPECT_GT(chi_square_test(counts, expect).p_value, 1e-3);
}

TEST(SigmaInteractive, HonestAcceptanceLaw) {
    auto inst = ham::make_handcrafted_instance("bell_stabilizer_yes", 2);
    double r = rate(20000, 2003, [&](Rng& rng) {
        fs::ProgrammableOracle ro(rand_u64(rng));
        auto keys = fs::sigma_preprocess(2, rng);
        return fs::sigma_run(keys, inst, *inst.witness, ro, rng);
    });
    EXPECT_DOUBLE_EQ(r, 1.0);
}

TEST(SigmaVerify2, TamperedOpeningRejects) {
    auto inst = ham::make_handcrafted_instance("bell_stabilizer_yes", 2);
    for (int t = 0; t < 1000; ++t) {
        Rng rng = derive_rng(2004, static_cast<std::uint64_t>(t));
        fs::ProgrammableOracle ro(rand_u64(rng));
        auto keys = fs::sigma_preprocess(2, rng);
        auto [msg1, st] = fs::sigma_prove1(keys.rho_p, inst, ro, rng);
        auto s = fs::sigma_verify1(2, rng);
        auto msg3 = fs::sigma_prove2(st, s);
        msg3.opened[0].x ^= 1;  // flip one opened bit
        EXPECT_FALSE(fs::sigma_verify2(keys.verification, inst, msg1, s, msg3, ro, rng));
    }
}

TEST(SigmaVerify2, EquivocationFailsBinding) {
    auto inst = ham::make_handcrafted_instance("bell_stabilizer_yes", 2);
    Rng rng = make_rng(7);
    fs::ProgrammableOracle ro(55);
    auto keys = fs::sigma_preprocess(2, rng);
    auto [msg1, st] = fs::sigma_prove1(keys.rho_p, inst, ro, rng);
    auto s = fs::sigma_verify1(2, rng);
    auto msg3 = fs::sigma_prove2(st, s);
    // try to open slot 0 to the complement value with fresh randomness
    msg3.opened[0].x ^= 1;
    msg3.opened[0].r = rand_bytes(rng, fs::kCommitRandomnessBytes);
    EXPECT_FALSE(fs::sigma_verify2(keys.verification, inst, msg1, s, msg3, ro, rng));
}

TEST(SigmaVirtual, AgreesWithInteractive) {
    auto yes_inst = ham::make_handcrafted_instance("bell_stabilizer_yes", 2);
    auto no_inst = ham::make_handcrafted_instance("anti_stabilizer_no", 2);
    auto ground = ham::ground_state(no_inst.hamiltonian).second;
    const std::uint64_t trials = 30000;
    double direct_yes = rate(trials, 2005, [&](Rng& rng) {
        fs::ProgrammableOracle ro(rand_u64(rng));
        auto keys = fs::sigma_preprocess(2, rng);
        return fs::sigma_run(keys, yes_inst, *yes_inst.witness, ro, rng);
    });
    double virtual_yes = rate(trials, 2006, [&](Rng& rng) {
        fs::ProgrammableOracle ro(rand_u64(rng));
        return fs::sigma_virtual_run(yes_inst, *yes_inst.witness, ro, rng);
    });
    double direct_no = rate(trials, 2007, [&](Rng& rng) {
        fs::ProgrammableOracle ro(rand_u64(rng));
        auto keys = fs::sigma_preprocess(2, rng);
        return fs::sigma_run(keys, no_inst, ground, ro, rng);
    });
    double virtual_no = rate(trials, 2008, [&](Rng& rng) {
        fs::ProgrammableOracle ro(rand_u64(rng));
        return fs::sigma_virtual_run(no_inst, ground, ro, rng);
    });
    double sigma2 = 2 * std::sqrt(0.25 / static_cast<double>(trials));
    EXPECT_NEAR(direct_yes, virtual_yes, 4 * sigma2);
    EXPECT_NEAR(direct_no, virtual_no, 4 * sigma2);
}

TEST(FsChallenge, DeterministicAndProgrammable) {
    fs::ProgrammableOracle ro(77);
    fs::Msg1 msg1;
    msg1.coms = {Bytes{1, 2}, Bytes{3, 4}, Bytes{5, 6}};
    auto a = fs::fs_challenge(ro, kId, 3, msg1);
    auto b = fs::fs_challenge(ro, kId, 3, msg1);
    EXPECT_EQ(a, b);

    // reprogramming the derivation point steers the challenge
    std::vector<int> target{0, 2};
    Bytes out = fs::detail::encode_u64_be(rank_admissible_subset(3, target), 8);
    Bytes tail(24, 0x5c);
    out.insert(out.end(), tail.begin(), tail.end());
    ro.reprogram(fs::detail::challenge_input(kId, fs::detail::encode_msg1(msg1), 0), out);
    EXPECT_EQ(fs::fs_challenge(ro, kId, 3, msg1), target);
}

TEST(FsChallenge, SubsetSizeHistogram) {
    fs::ProgrammableOracle ro(78);
    std::vector<std::uint64_t> counts(5, 0);
    Rng rng = make_rng(8);
    fs::Msg1 msg1;
    msg1.coms = {rand_bytes(rng, 8)};
    for (int t = 0; t < 100000; ++t) {
        msg1.coms[0] = rand_bytes(rng, 8);
        ++counts[fs::fs_challenge(ro, kId, 7, msg1).size() - 1];
    }
    std::vector<double> expect;
    double total = static_cast<double>(admissible_subset_count(7));
    for (int k = 1; k <= 5; ++k) expect.push_back(static_cast<double>(binom(7, k)) / total);
    EXPECT_GT(chi_square_test(counts, expect).p_value, 1e-3);
}

TEST(Fs, HonestMatchesInteractive) {
    auto inst = ham::make_handcrafted_instance("bell_stabilizer_yes", 2);
    double r = rate(20000, 2009, [&](Rng& rng) {
        fs::ProgrammableOracle ro(rand_u64(rng));
        auto keys = fs::sigma_preprocess(2, rng);
        auto proof = fs::fs_prove(keys.rho_p, inst, kId, ro, rng);
        return fs::fs_verify(keys.verification, inst, kId, proof, ro, rng);
    });
    EXPECT_DOUBLE_EQ(r, 1.0);
}

TEST(Fs, ReplayUnderFreshOracleDies) {
    auto inst = ham::make_handcrafted_instance("bell_stabilizer_yes", 2);
    std::uint64_t accepted = 0;
    for (int t = 0; t < 1000; ++t) {
        Rng rng = derive_rng(2010, static_cast<std::uint64_t>(t));
        fs::ProgrammableOracle ro1(rand_u64(rng));
        fs::ProgrammableOracle ro2(rand_u64(rng));
        auto keys = fs::sigma_preprocess(2, rng);
        auto proof = fs::fs_prove(keys.rho_p, inst, kId, ro1, rng);
        accepted += fs::fs_verify(keys.verification, inst, kId, proof, ro2, rng);
    }
    EXPECT_EQ(accepted, 0u);  // commitments recompute differently under the new table
}

TEST(Fs, ProofSerializationRoundTrip) {
    auto inst = ham::make_handcrafted_instance("ghz_yes", 3);
    Rng rng = make_rng(9);
    fs::ProgrammableOracle ro(99);
    auto keys = fs::sigma_preprocess(3, rng);
    auto proof = fs::fs_prove(keys.rho_p, inst, kId, ro, rng);
    auto back = fs::fs_proof_from_json(fs::fs_proof_to_json(proof));
    EXPECT_EQ(back.msg1.coms, proof.msg1.coms);
    ASSERT_EQ(back.msg3.opened.size(), proof.msg3.opened.size());
    for (std::size_t i = 0; i < proof.msg3.opened.size(); ++i) {
        EXPECT_EQ(back.msg3.opened[i].j, proof.msg3.opened[i].j);
        EXPECT_EQ(back.msg3.opened[i].r, proof.msg3.opened[i].r);
    }
    EXPECT_TRUE(fs::fs_verify(keys.verification, inst, kId, back, ro, rng));
}

TEST(FsSimulate, VerifiesWithOneReprogram) {
    auto inst = ham::make_handcrafted_instance("bell_stabilizer_yes", 2);
    double r = rate(10000, 2011, [&](Rng& rng) {
        fs::ProgrammableOracle ro(rand_u64(rng));
        auto keys = fs::sigma_preprocess(2, rng);
        auto proof = fs::fs_simulate(keys.rho_p, inst, kId, ro, rng);
        bool ok = fs::fs_verify(keys.verification, inst, kId, proof, ro, rng);
        return ok && ro.reprogram_count() == 1;
    });
    EXPECT_DOUBLE_EQ(r, 1.0);
}

TEST(FsSimulate, OpenedSlotDistributionExact) {
    // For a fixed key and challenge set, the simulator's opened bits follow
    // exactly the honest marginal on those slots (the local density matrix
    // is the exact partial trace).
    auto inst = ham::make_handcrafted_instance("ghz_yes", 3);
    Rng krng = make_rng(10);
    auto keys = fs::sigma_preprocess(3, krng);
    std::vector<std::pair<int, int>> all_pairs{{0, 3}, {1, 4}, {2, 5}};
    auto honest_table = bell_outcome_distribution(inst.witness->tensor(keys.rho_p), all_pairs);
    for (const std::vector<int>& s : {std::vector<int>{0}, {0, 2}, {0, 1, 2}}) {
        const int k = static_cast<int>(s.size());
        // honest marginal on the opened slots
        std::vector<double> honest(std::size_t{1} << (2 * k), 0.0);
        for (std::size_t idx = 0; idx < honest_table.size(); ++idx) {
            std::size_t key = 0;
            for (int t = 0; t < k; ++t) {
                int j = s[static_cast<std::size_t>(t)];
                key |= (((idx >> (2 * j)) & 1) | (((idx >> (2 * j + 1)) & 1) << 1)) << (2 * t);
            }
            honest[key] += honest_table[idx];
        }
        // simulator table
        DensityMatrix joint =
            ham::sim_hist(inst, s).tensor(partial_trace(keys.rho_p, s));
        std::vector<std::pair<int, int>> pairs;
        for (int t = 0; t < k; ++t) pairs.emplace_back(t, k + t);
        auto sim = bell_outcome_distribution(joint, pairs);
        EXPECT_LE(total_variation(honest, sim), 1e-6);
    }
}

TEST(SigmaSimulate, HidingGameOnUnopenedCommitments) {
    // fixed distinguisher reading only the commitments: XOR of all bytes
    auto inst = ham::make_handcrafted_instance("bell_stabilizer_yes", 2);
    std::uint64_t hits = 0;
    const std::uint64_t trials = 10000;
    for (std::uint64_t t = 0; t < trials; ++t) {
        Rng rng = derive_rng(2012, t);
        fs::ProgrammableOracle ro(rand_u64(rng));
        auto keys = fs::sigma_preprocess(2, rng);
        int b = rand_bit(rng);
        fs::Msg1 msg1;
        if (b == 0) {
            auto [m1, st] = fs::sigma_prove1(keys.rho_p, inst, ro, rng);
            msg1 = m1;
        } else {
            auto [m1, m3] = fs::sigma_simulate(keys.rho_p, inst, {0}, ro, rng);
            msg1 = m1;
        }
        std::uint8_t acc = 0;
        for (const auto& com : msg1.coms) {
            for (auto byte : com) acc ^= byte;
        }
        if (static_cast<int>(acc & 1) == b) ++hits;
    }
    double advantage = std::abs(static_cast<double>(hits) / static_cast<double>(trials) - 0.5);
    EXPECT_LE(advantage, 0.02);
}

TEST(SigmaSimulate, OpenedSlotsVerify) {
    auto inst = ham::make_handcrafted_instance("ghz_yes", 3);
    Rng rng = make_rng(11);
    fs::ProgrammableOracle ro(111);
    auto keys = fs::sigma_preprocess(3, rng);
    auto [msg1, msg3] = fs::sigma_simulate(keys.rho_p, inst, {0, 2}, ro, rng);
    for (const auto& o : msg3.opened) {
        fs::Decommitment d{fs::encode_xz(o.x, o.z), o.r};
        EXPECT_TRUE(fs::verify_commit(ro, d.message, msg1.coms[static_cast<std::size_t>(o.j)], d));
    }
}

TEST(ChallengeCoupling, FsBoundedByWorstSigmaChallenge) {
    // a prover that fixes its first message cannot do better under the hash
    // than under its best interactive challenge
    auto inst = ham::make_handcrafted_instance("anti_stabilizer_no", 2);
    auto ground = ham::ground_state(inst.hamiltonian).second;
    const std::uint64_t trials = 30000;
    double fs_rate = rate(trials, 2013, [&](Rng& rng) {
        fs::ProgrammableOracle ro(rand_u64(rng));
        auto keys = fs::sigma_preprocess(2, rng);
        auto proof = fs::fs_prove_with_state(ground, keys.rho_p, kId, 2, ro, rng);
        return fs::fs_verify(keys.verification, inst, kId, proof, ro, rng);
    });
    double worst = 0;
    for (std::uint64_t si = 0; si < admissible_subset_count(2); ++si) {
        auto s = unrank_admissible_subset(2, si);
        double r = rate(trials, 2014 + si, [&](Rng& rng) {
            fs::ProgrammableOracle ro(rand_u64(rng));
            auto keys = fs::sigma_preprocess(2, rng);
            auto [msg1, st] = fs::sigma_prove1_with_state(ground, keys.rho_p, ro, rng);
            auto msg3 = fs::sigma_prove2(st, s);
            return fs::sigma_verify2(keys.verification, inst, msg1, s, msg3, ro, rng);
        });
        worst = std::max(worst, r);
    }
    double sigma = std::sqrt(0.25 / static_cast<double>(trials));
    EXPECT_LE(fs_rate, worst + 4 * sigma);
}

TEST(SharedBell, SetupStateAndDoubleMeasureGuard) {
    auto session = fs::SharedBellSession::create(2);
    EXPECT_NEAR(session.joint.fidelity_with(make_bell_pairs(2)), 1.0, 1e-12);
    Rng rng = make_rng(12);
    fs::shared_bell_measure_key(session, rng);
    EXPECT_THROW(fs::shared_bell_measure_key(session, rng), std::runtime_error);
}

TEST(SharedBell, MatchesFsAndOrderingIrrelevant) {
    auto inst = ham::make_handcrafted_instance("bell_stabilizer_yes", 2);
    const std::uint64_t trials = 20000;
    double verifier_last = rate(trials, 2020, [&](Rng& rng) {
        fs::ProgrammableOracle ro(rand_u64(rng));
        auto session = fs::SharedBellSession::create(2);
        auto proof = fs::shared_bell_prove(session, inst, kId, ro, rng);
        auto kv = fs::shared_bell_measure_key(session, rng);
        return fs::fs_verify(kv, inst, kId, proof, ro, rng);
    });
    double verifier_first = rate(trials, 2021, [&](Rng& rng) {
        fs::ProgrammableOracle ro(rand_u64(rng));
        auto session = fs::SharedBellSession::create(2);
        auto kv = fs::shared_bell_measure_key(session, rng);
        auto proof = fs::shared_bell_prove(session, inst, kId, ro, rng);
        return fs::fs_verify(kv, inst, kId, proof, ro, rng);
    });
    double plain_fs = rate(trials, 2022, [&](Rng& rng) {
        fs::ProgrammableOracle ro(rand_u64(rng));
        auto keys = fs::sigma_preprocess(2, rng);
        auto proof = fs::fs_prove(keys.rho_p, inst, kId, ro, rng);
        return fs::fs_verify(keys.verification, inst, kId, proof, ro, rng);
    });
    double sigma2 = 2 * std::sqrt(0.25 / static_cast<double>(trials));
    EXPECT_NEAR(verifier_last, plain_fs, 4 * sigma2);
    EXPECT_NEAR(verifier_first, verifier_last, 4 * sigma2);
}

TEST(SigmaInteractive, GroundCheatFollowsTheLaw) {
    auto inst = ham::make_handcrafted_instance("anti_stabilizer_no", 2);
    auto ground = ham::ground_state(inst.hamiltonian).second;
    const double law = 1.0 - 0.5 / 729.0;
    const std::uint64_t trials = 50000;
    double r = rate(trials, 2030, [&](Rng& rng) {
        fs::ProgrammableOracle ro(rand_u64(rng));
        auto keys = fs::sigma_preprocess(2, rng);
        return fs::sigma_run(keys, inst, ground, ro, rng);
    });
    EXPECT_LE(binomial_deviation_sigmas(r, law, trials), 4.0) << r;
}

TEST(FsChallenge, CounterModeExpansionAndExhaustionCap) {
    fs::Msg1 msg1;
    msg1.coms = {Bytes{0xaa}};
    const Bytes enc = fs::detail::encode_msg1(msg1);
    // rejecting every block of the first query pushes derivation into the
    // counter-1 re-query
    {
        fs::ProgrammableOracle ro(200);
        ro.reprogram(fs::detail::challenge_input(kId, enc, 0), Bytes(32, 0xff));
        auto s = fs::fs_challenge(ro, kId, 3, msg1);
        EXPECT_GE(s.size(), 1u);
        EXPECT_LE(s.size(), 3u);
    }
    // rigging all sixteen queries exhausts the 64-block budget
    {
        fs::ProgrammableOracle ro(201);
        for (std::uint32_t counter = 0; counter < 16; ++counter) {
            ro.reprogram(fs::detail::challenge_input(kId, enc, counter), Bytes(32, 0xff));
        }
        EXPECT_THROW(fs::fs_challenge(ro, kId, 3, msg1), std::runtime_error);
    }
}

TEST(Oracle, TranscriptDumpsQueriedPoints) {
    fs::ProgrammableOracle ro(202);
    ro.record_transcript(true);
    Bytes a{1}, b{2};
    auto va = ro.query(a);
    ro.query(b);
    auto j = ro.transcript_json();
    ASSERT_EQ(j.size(), 2u);
    EXPECT_EQ(j[0].at("in"), to_hex(a));
    EXPECT_EQ(j[0].at("out"), to_hex(va));
}

TEST(SigmaAmplify, RepsOneIsIdentityAndModesVerify) {
    auto inst = ham::make_handcrafted_instance("bell_stabilizer_yes", 2);
    for (auto mode : {fs::ChallengeMode::joint, fs::ChallengeMode::per_copy}) {
        for (int reps : {1, 3}) {
            Rng rng = make_rng(13 + reps);
            fs::ProgrammableOracle ro(rand_u64(rng));
            std::vector<fs::SigmaKeys> keys;
            for (int r = 0; r < reps; ++r) keys.push_back(fs::sigma_preprocess(2, rng));
            fs::SigmaAmplification amp{reps, 1.0, 1.0 - 0.5 / 729.0, mode};
            auto proof = fs::fs_amplified_prove(keys, inst, kId, amp, ro, rng);
            EXPECT_EQ(proof.copies.size(), static_cast<std::size_t>(reps));
            EXPECT_TRUE(fs::fs_amplified_verify(keys, inst, kId, proof, amp, ro, rng));
        }
    }
}
