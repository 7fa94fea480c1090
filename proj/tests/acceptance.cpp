// Acceptance suite: one pass/fail line per criterion, nonzero exit if any
// criterion fails. Counts and tolerances are pinned here, not configurable.

#include <chrono>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <vector>

#include "klepto/distinguish.hpp"
#include "klepto/error.hpp"
#include "klepto/parallel.hpp"
#include "klepto/supervisor.hpp"
#include "support.hpp"

using namespace klepto;
using namespace testsupport;

namespace {

struct Criterion {
    std::string name;
    std::function<std::string()> run; // returns detail, throws on failure
    double time_limit_seconds = 0.0;  // 0 = no stated limit

    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

struct CriterionFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require(bool condition, const std::string& message)
{
    if (!condition)
        throw CriterionFailure(message);
}

// Fixtures shared across criteria (seeded, so every run is identical).
struct Lab {
    const CurveParams& toy = registry_get("toy");
    const CurveParams& secp = registry_get("secp256k1");

    KeyPair toy_attacker;
    KeyPair toy_victim;
    SetupParams toy_setup;

    KeyPair secp_attacker;
    KeyPair secp_victim;
    SetupParams secp_setup;

    // built by criterion 5, reused by criterion 4
    Corpus secp_honest;
    Corpus secp_malicious;

    Lab()
    {
        auto rng = test_rng("acceptance-lab");
        toy_attacker = keygen(rng, toy);
        toy_victim = keygen(rng, toy);
        toy_setup = make_default_setup(toy_attacker.Q, ascii_bytes("acceptance-toy-seed"));
        secp_attacker = keygen(rng, secp);
        secp_victim = keygen(rng, secp);
        secp_setup = make_default_setup(secp_attacker.Q, ascii_bytes("acceptance-secp-seed"));
    }
};

// e + d*r != 0 for every achievable r, so s = 0 never occurs in exhaustive loops.
BigInt grid_safe_private_key(ByteView msg, const CurveParams& params)
{
    BigInt e = message_scalar(msg, params);
    const auto& table = toyoracle::multiples_of_g();
    for (BigInt d = 1; d < params.n; ++d) {
        bool safe = true;
        for (toyoracle::u64 k = 1; k < toyoracle::kN && safe; ++k)
            safe = mod(e + d * BigInt(static_cast<unsigned long>(table[k].x)), params.n) != 0;
        if (safe)
            return d;
    }
    throw CriterionFailure("no grid-safe key found");
}

std::string criterion1_attack_completeness(Lab& lab)
{
    // toy curve, exhaustive: every c1 and both t bits recover the generated c2
    std::size_t toy_total = 0, toy_recovered = 0, degenerate = 0;
    for (toyoracle::u64 c1 = 1; c1 < toyoracle::kN; ++c1) {
        for (int t = 0; t <= 1; ++t) {
            BigInt c1_big(static_cast<unsigned long>(c1));
            BigInt g_coeff = mod(c1_big - lab.toy_setup.omega * t, lab.toy.n);
            BigInt q_coeff = mod(-(lab.toy_setup.alpha * c1_big) - lab.toy_setup.beta, lab.toy.n);
            Point z = point_add(scalar_mul(g_coeff, lab.toy.G, lab.toy),
                                scalar_mul(q_coeff, lab.toy_setup.attacker_pub, lab.toy), lab.toy);
            if (z.infinity) {
                degenerate += 1; // the generator re-picks t here
                continue;
            }
            BigInt c2 = klepto_prng(z, lab.toy_setup.prng_seed, 0, lab.toy);
            Point m1 = scalar_mul(c1_big, lab.toy.G, lab.toy);
            Point m2 = scalar_mul(c2, lab.toy.G, lab.toy);
            toy_total += 1;
            auto recovered = klepto_recover(m1, m2, lab.toy_attacker.d, lab.toy_setup,
                                            kDefaultMaxRetry, lab.toy);
            if (recovered && *recovered == c2)
                toy_recovered += 1;
        }
    }
    require(degenerate <= 2, "more degenerate Z cases than the construction allows");
    require(toy_recovered == toy_total, "toy-curve recovery is not exhaustive");

    // secp256k1: 1000 malicious signature pairs, exact private key every time
    auto rng = test_rng("acceptance-c1");
    Corpus pairs =
        generate_corpus(CorpusMode::malicious, 2000, lab.secp_victim, lab.secp_setup, lab.secp,
                        rng);
    std::vector<char> hit(1000, 0);
    parallel_for(1000, 0, [&](unsigned, std::size_t i) {
        auto d = attacker_recover_privkey(pairs.records[2 * i], pairs.records[2 * i + 1],
                                          lab.secp_attacker.d, lab.secp_setup, lab.secp);
        hit[i] = d && *d == lab.secp_victim.d ? 1 : 0;
    });
    std::size_t secp_recovered = 0;
    for (char h : hit) secp_recovered += h;
    require(secp_recovered == 1000, "secp256k1 recovery is not 1000/1000");

    std::ostringstream detail;
    detail << "toy " << toy_recovered << "/" << toy_total << " exhaustive, secp256k1 "
           << secp_recovered << "/1000 pairs";
    return detail.str();
}

std::string criterion2_soundness(Lab& lab)
{
    auto rng = test_rng("acceptance-c2");
    Corpus honest = generate_corpus(CorpusMode::honest, 2000, lab.secp_victim, {}, lab.secp, rng);
    std::vector<char> hits(1000, 0);
    parallel_for(1000, 0, [&](unsigned, std::size_t i) {
        auto d = attacker_recover_privkey(honest.records[2 * i], honest.records[2 * i + 1],
                                          lab.secp_attacker.d, lab.secp_setup, lab.secp);
        hits[i] = d.has_value() ? 1 : 0;
    });
    std::size_t false_hits = 0;
    for (char h : hits) false_hits += h;
    require(false_hits == 0, "honest pairs produced recoveries");
    return "0/1000 honest pairs recovered (tolerance 0)";
}

std::string criterion3_extraction(Lab& lab)
{
    // exhaustive (d, k) grid on the toy curve, known nonce
    Bytes grid_msg = ascii_bytes("acceptance extraction grid");
    std::size_t known_checked = 0, known_skipped = 0;
    {
        std::vector<std::size_t> checked(toyoracle::kN, 0), skipped(toyoracle::kN, 0);
        parallel_for(toyoracle::kN - 1, 0, [&](unsigned, std::size_t idx) {
            toyoracle::u64 d = idx + 1;
            BigInt dd(static_cast<unsigned long>(d));
            for (toyoracle::u64 k = 1; k < toyoracle::kN; ++k) {
                BigInt kk(static_cast<unsigned long>(k));
                Signature sig;
                try {
                    sig = sign(grid_msg, dd, kk, lab.toy);
                } catch (const RetryNonceError&) {
                    skipped[d] += 1; // s = 0 cell, unsignable by contract
                    continue;
                }
                if (extract_key_from_known_nonce(grid_msg, sig, kk, lab.toy) != dd)
                    throw CriterionFailure("known-nonce extraction missed");
                checked[d] += 1;
            }
        });
        for (toyoracle::u64 d = 1; d < toyoracle::kN; ++d) {
            known_checked += checked[d];
            known_skipped += skipped[d];
        }
    }
    require(known_checked + known_skipped == 828ul * 828ul, "grid coverage is wrong");

    // exhaustive (d, k1) grid, linear relation k2 = 3*k1 + 11
    std::size_t linear_checked = 0;
    {
        Bytes m1 = ascii_bytes("acceptance linear grid 1");
        Bytes m2 = ascii_bytes("acceptance linear grid 2");
        const BigInt a = 3, b = 11;
        std::vector<std::size_t> checked(toyoracle::kN, 0);
        parallel_for(toyoracle::kN - 1, 0, [&](unsigned, std::size_t idx) {
            toyoracle::u64 d = idx + 1;
            BigInt dd(static_cast<unsigned long>(d));
            for (toyoracle::u64 k1 = 1; k1 < toyoracle::kN; ++k1) {
                BigInt kk1(static_cast<unsigned long>(k1));
                BigInt k2 = mod(a * kk1 + b, lab.toy.n);
                if (k2 == 0)
                    continue;
                Signature s1, s2;
                try {
                    s1 = sign(m1, dd, kk1, lab.toy);
                    s2 = sign(m2, dd, k2, lab.toy);
                } catch (const RetryNonceError&) {
                    continue;
                }
                LinearRelationKey got;
                try {
                    got = extract_key_from_linear_relation(m1, s1, m2, s2, a, b, lab.toy);
                } catch (const ValidationError&) {
                    continue; // singular cell
                }
                if (got.d != dd || got.k1 != kk1)
                    throw CriterionFailure("linear-relation extraction missed");
                checked[d] += 1;
            }
        });
        for (toyoracle::u64 d = 1; d < toyoracle::kN; ++d)
            linear_checked += checked[d];
        require(linear_checked > 650000, "linear grid lost too many cells");
    }

    // 1000 random trials each on secp256k1
    {
        std::vector<char> ok(1000, 0);
        parallel_for(1000, 0, [&](unsigned worker, std::size_t i) {
            auto rng = test_rng("acceptance-c3").fork(static_cast<std::uint32_t>(i));
            (void)worker;
            KeyPair kp = keygen(rng, lab.secp);
            Bytes msg = random_bytes(rng, 32);
            BigInt k = random_scalar(rng, lab.secp.n);
            Signature sig = sign(msg, kp.d, k, lab.secp);
            bool known_ok = extract_key_from_known_nonce(msg, sig, k, lab.secp) == kp.d;

            BigInt a = random_scalar(rng, lab.secp.n);
            BigInt b = random_scalar(rng, lab.secp.n);
            BigInt k2 = mod(a * k + b, lab.secp.n);
            bool linear_ok = true;
            if (k2 != 0) {
                Bytes msg2 = random_bytes(rng, 32);
                Signature sig2 = sign(msg2, kp.d, k2, lab.secp);
                LinearRelationKey got =
                    extract_key_from_linear_relation(msg, sig, msg2, sig2, a, b, lab.secp);
                linear_ok = got.d == kp.d && got.k1 == k;
            }
            ok[i] = known_ok && linear_ok ? 1 : 0;
        });
        for (char h : ok)
            require(h == 1, "a secp256k1 extraction trial failed");
    }

    std::ostringstream detail;
    detail << "toy grids " << known_checked << " known-nonce + " << linear_checked
           << " linear cells, secp256k1 1000/1000 each";
    return detail.str();
}

std::string criterion4_format_compliance(Lab& lab)
{
    require(!lab.secp_malicious.records.empty(), "criterion 5 must run before criterion 4");
    std::size_t total = 0;
    std::vector<const Corpus*> corpora = {&lab.secp_malicious};

    // plus a fresh toy malicious corpus so both curves are covered
    auto rng = test_rng("acceptance-c4");
    Corpus toy_corpus =
        generate_corpus(CorpusMode::malicious, 2000, lab.toy_victim, lab.toy_setup, lab.toy, rng);
    corpora.push_back(&toy_corpus);

    for (const Corpus* corpus : corpora) {
        const CurveParams& params = registry_get(corpus->curve);
        std::vector<char> ok(corpus->records.size(), 0);
        parallel_for(corpus->records.size(), 0, [&](unsigned, std::size_t i) {
            const SignatureRecord& rec = corpus->records[i];
            bool valid = verify(rec.msg, rec.sig, rec.pubkey, params).accepted();
            valid = valid && rec.sig.r >= 1 && rec.sig.r < params.n;
            valid = valid && rec.sig.s >= 1 && rec.sig.s < params.n;
            ok[i] = valid ? 1 : 0;
        });
        for (char h : ok)
            require(h == 1, "a malicious signature failed standard verification");
        total += corpus->records.size();
    }
    std::ostringstream detail;
    detail << total << "/" << total << " malicious signatures pass verify()";
    return detail.str();
}

std::string criterion5_indistinguishability(Lab& lab)
{
    auto rng = test_rng("acceptance-c5");
    lab.secp_honest =
        generate_corpus(CorpusMode::honest, 10000, lab.secp_victim, {}, lab.secp, rng);
    lab.secp_malicious = generate_corpus(CorpusMode::malicious, 10000, lab.secp_victim,
                                         lab.secp_setup, lab.secp, rng);

    // third-party battery must NOT separate honest from malicious
    auto reports = third_party_tests(lab.secp_honest, lab.secp_malicious, lab.secp, 0.001);
    for (const StatReport& r : reports)
        require(r.pass, "third-party battery separated the corpora: " + r.test_name +
                            " p=" + std::to_string(r.p_value));

    // the battery has power: a biased corpus IS rejected
    Corpus biased =
        generate_corpus(CorpusMode::biased, 10000, lab.secp_victim, {}, lab.secp, rng);
    auto control = third_party_tests(lab.secp_honest, biased, lab.secp, 0.001);
    bool any_failed = false;
    for (const StatReport& r : control)
        any_failed = any_failed || !r.pass;
    require(any_failed, "positive control was not rejected, the battery has no power");

    // attacker distinguisher on the same corpora
    DistinguisherReport mal =
        attacker_distinguisher(lab.secp_malicious, lab.secp_attacker.d, lab.secp_setup, lab.secp,
                               2000);
    require(mal.verdict_malicious, "attacker failed to flag the malicious corpus");
    require(mal.klepto_pairs == 1000 && mal.klepto_recovered == 1000,
            "attacker detection below 100%");
    require(mal.nonklepto_recovered == 0, "attacker hit a non-kleptogram pair");

    DistinguisherReport hon = attacker_distinguisher(lab.secp_honest, lab.secp_attacker.d,
                                                     lab.secp_setup, lab.secp, 1000);
    require(!hon.verdict_malicious && hon.nonklepto_recovered == 0,
            "attacker false-positived on the honest corpus");

    std::ostringstream detail;
    detail << "battery p_min=";
    double pmin = 1.0;
    for (const StatReport& r : reports)
        pmin = std::min(pmin, r.p_value);
    detail << pmin << " (all pass), control rejected, detection " << mal.klepto_recovered
           << "/1000, false positives 0/" << (mal.nonklepto_pairs + hon.nonklepto_pairs);
    return detail.str();
}

std::string criterion6_supervisor(Lab& lab)
{
    // exhaustive (t, u) grid on the toy curve, honest interactive runs
    Bytes m = ascii_bytes("acceptance supervisor grid");
    BigInt d = grid_safe_private_key(m, lab.toy);
    KeyPair keys{d, scalar_mul(d, lab.toy.G, lab.toy)};

    std::size_t grid_total = 0;
    {
        std::vector<char> ok(toyoracle::kN, 1);
        parallel_for(toyoracle::kN - 1, 0, [&](unsigned, std::size_t idx) {
            toyoracle::u64 t = idx + 1;
            BigInt tt(static_cast<unsigned long>(t));
            Point t_point = scalar_mul(tt, lab.toy.G, lab.toy);
            Digest h_t = sha256(encode_point(t_point, lab.toy));
            for (toyoracle::u64 u = 1; u < toyoracle::kN; ++u) {
                BigInt uu(static_cast<unsigned long>(u));
                SignerSession signer{keys, tt, {}, SignerPhase::committed};
                SupervisorSession supervisor{keys.Q, SupervisorPending{h_t, uu, m},
                                             {}, SupervisorPhase::challenged};
                SignerFinish finish = signer_finish(signer, uu, m, lab.toy);
                ValidationOutcome outcome = supervisor_validate(
                    supervisor, finish.reveal.t_point, finish.sig.sig, m, lab.toy);
                if (!outcome.accepted) {
                    ok[t] = 0;
                    return;
                }
            }
        });
        for (toyoracle::u64 t = 1; t < toyoracle::kN; ++t)
            require(ok[t] == 1, "an honest (t, u) run was rejected");
        grid_total = static_cast<std::size_t>(toyoracle::kN - 1) * (toyoracle::kN - 1);
    }

    // a SETUP-substituting signer is rejected 1000/1000 with nonce-mismatch
    {
        auto rng = test_rng("acceptance-c6");
        KleptoState cheat{lab.secp_setup, KleptoPhase::round1_pending, 0};
        KeyPair victim = lab.secp_victim;
        for (int i = 0; i < 1000; ++i) {
            SignerSession signer{victim, {}, {}, SignerPhase::idle};
            SupervisorSession supervisor{victim.Q, {}, {}, SupervisorPhase::idle};
            Bytes msg = random_bytes(rng, 24);
            CommitMsg commit = signer_commit(signer, rng, lab.secp);
            ChallengeMsg challenge = supervisor_challenge(supervisor, commit, msg, rng, lab.secp);
            SignerFinish finish =
                signer_finish_cheating(signer, challenge.u, msg, cheat, rng, lab.secp);
            ValidationOutcome outcome = supervisor_validate(
                supervisor, finish.reveal.t_point, finish.sig.sig, msg, lab.secp);
            require(!outcome.accepted, "a SETUP nonce slipped past the supervisor");
            require(outcome.reason == RejectReason::nonce_mismatch,
                    "rejection reason is not nonce-mismatch");
        }
    }

    // prearranged list discipline: exactly l signatures, then exhaustion
    {
        auto rng = test_rng("acceptance-c6-pre");
        const std::size_t list_len = 5;
        SignerSession signer{keys, {}, {}, SignerPhase::idle};
        SupervisorSession supervisor{keys.Q, {}, {}, SupervisorPhase::idle};
        supervisor_receive_prearrange(supervisor, prearrange(signer, list_len, rng, lab.toy));
        for (std::size_t i = 0; i < list_len; ++i) {
            Bytes msg = random_bytes(rng, 16);
            SignatureRecord rec = sign_prearranged(signer, supervisor, msg, rng, lab.toy);
            require(verify(rec.msg, rec.sig, rec.pubkey, lab.toy).accepted(),
                    "prearranged signature does not verify");
        }
        require(signer.choice_list.empty() && supervisor.hash_list.empty(),
                "lists were not drained");
        bool exhausted = false;
        try {
            sign_prearranged(signer, supervisor, ascii_bytes("extra"), rng, lab.toy);
        } catch (const ValidationError& e) {
            exhausted = std::string(e.what()).find("exhausted") != std::string::npos;
        }
        require(exhausted, "exhaustion error missing");
    }

    std::ostringstream detail;
    detail << "interactive grid " << grid_total << "/" << grid_total
           << " accepted, cheat rejected 1000/1000 (nonce-mismatch), list discipline holds";
    return detail.str();
}

std::string criterion7_deterministic(Lab& lab)
{
    // identical (key, message) -> byte-identical signatures
    auto rng = test_rng("acceptance-c7");
    for (int i = 0; i < 500; ++i) {
        KeyPair kp = keygen(rng, lab.toy);
        Bytes msg = random_bytes(rng, 32);
        BigInt k1 = derive_deterministic_nonce(kp.d, msg, lab.toy);
        BigInt k2 = derive_deterministic_nonce(kp.d, msg, lab.toy);
        require(k1 == k2, "deterministic nonce is not deterministic");
        try {
            Signature a = sign(msg, kp.d, k1, lab.toy);
            Signature b = sign(msg, kp.d, k2, lab.toy);
            require(signature_to_hex(a, lab.toy) == signature_to_hex(b, lab.toy),
                    "deterministic signatures differ");
        } catch (const RetryNonceError&) {
            // unsignable (d, msg) pair on the toy curve; determinism still held
        }
    }

    // r over distinct messages is uniform across the achievable r values
    const auto& table = toyoracle::multiples_of_g();
    std::map<toyoracle::u64, std::size_t> r_slot;
    for (toyoracle::u64 k = 1; k < toyoracle::kN; ++k)
        r_slot.emplace(table[k].x, r_slot.size());
    std::vector<std::uint64_t> counts(r_slot.size(), 0);

    BigInt d = random_scalar(rng, lab.toy.n);
    std::size_t samples = 0;
    while (samples < 100000) {
        Bytes msg = random_bytes(rng, 16);
        BigInt k = derive_deterministic_nonce(d, msg, lab.toy);
        Signature sig;
        try {
            sig = sign(msg, d, k, lab.toy);
        } catch (const RetryNonceError&) {
            continue;
        }
        counts[r_slot.at(mpz_get_ui(sig.r.get_mpz_t()))] += 1;
        samples += 1;
    }
    Chi2Result chi = chi2_uniform(counts);
    require(chi.p_value > 0.001, "deterministic-mode r values are not uniform, p=" +
                                     std::to_string(chi.p_value));

    std::ostringstream detail;
    detail << "500/500 byte-identical, r-uniformity chi2 p=" << chi.p_value << " over "
           << counts.size() << " achievable values";
    return detail.str();
}

std::string criterion8_oracle_equivalence(Lab& lab)
{
    const auto& table = toyoracle::multiples_of_g();

    // scalar_mul against the repeated-addition oracle, all k
    for (toyoracle::u64 k = 0; k < toyoracle::kN; ++k) {
        Point got = scalar_mul(BigInt(static_cast<unsigned long>(k)), lab.toy.G, lab.toy);
        require(toyoracle::from_point(got) == table[k], "scalar_mul disagrees with the oracle");
    }

    // reconstruct_nonce_point equals kG for every k
    Bytes msg = ascii_bytes("acceptance oracle equivalence");
    BigInt d = grid_safe_private_key(msg, lab.toy);
    Point q = scalar_mul(d, lab.toy.G, lab.toy);
    for (toyoracle::u64 k = 1; k < toyoracle::kN; ++k) {
        Signature sig = sign(msg, d, BigInt(static_cast<unsigned long>(k)), lab.toy);
        Point r = reconstruct_nonce_point(msg, sig, q, lab.toy);
        require(toyoracle::from_point(r) == table[k], "reconstructed nonce point is not kG");
    }

    std::ostringstream detail;
    detail << "scalar_mul " << toyoracle::kN << "/" << toyoracle::kN
           << " vs oracle, nonce point " << (toyoracle::kN - 1) << "/" << (toyoracle::kN - 1)
           << " equal kG";
    return detail.str();
}

} // namespace

int main()
{
    Lab lab;

    std::vector<Criterion> criteria;
    auto add = [&](std::string name, std::function<std::string()> run, double limit = 0.0) {
        Criterion criterion;
        criterion.name = std::move(name);
        criterion.run = std::move(run);
        criterion.time_limit_seconds = limit;
        criteria.push_back(std::move(criterion));
    };
    add("1 attack completeness", [&] { return criterion1_attack_completeness(lab); }, 120.0);
    add("2 attack soundness", [&] { return criterion2_soundness(lab); });
    add("3 extraction formulas", [&] { return criterion3_extraction(lab); });
    add("5 setup property 5 (indistinguishability)",
        [&] { return criterion5_indistinguishability(lab); });
    add("4 setup property 4 (format compliance)",
        [&] { return criterion4_format_compliance(lab); });
    add("6 supervisor protocol", [&] { return criterion6_supervisor(lab); });
    add("7 deterministic mode", [&] { return criterion7_deterministic(lab); });
    add("8 oracle equivalence", [&] { return criterion8_oracle_equivalence(lab); });

    bool all_passed = true;
    for (Criterion& criterion : criteria) {
        auto start = std::chrono::steady_clock::now();
        try {
            criterion.detail = criterion.run();
            criterion.passed = true;
        } catch (const std::exception& e) {
            criterion.detail = e.what();
            criterion.passed = false;
        }
        criterion.seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (criterion.passed && criterion.time_limit_seconds > 0.0 &&
            criterion.seconds > criterion.time_limit_seconds) {
            criterion.passed = false;
            criterion.detail += " [exceeded the stated time limit]";
        }
        all_passed = all_passed && criterion.passed;
        std::printf("[%s] criterion %s: %s (%.1f s)\n", criterion.passed ? "PASS" : "FAIL",
                    criterion.name.c_str(), criterion.detail.c_str(), criterion.seconds);
        std::fflush(stdout);
    }
    std::printf("%s\n", all_passed ? "ACCEPTANCE: all criteria passed"
                                   : "ACCEPTANCE: FAILURES PRESENT");
    return all_passed ? 0 : 1;
}
