#include "klepto/distinguish.hpp"

#include <algorithm>
#include <cmath>

#include "klepto/error.hpp"
#include "klepto/parallel.hpp"

namespace klepto {

const char* corpus_mode_name(CorpusMode mode)
{
    switch (mode) {
    case CorpusMode::honest: return "honest";
    case CorpusMode::malicious: return "malicious";
    case CorpusMode::deterministic: return "deterministic";
    case CorpusMode::biased: return "biased";
    }
    return "unknown";
}

namespace {

constexpr std::size_t kMessageBytes = 32;

std::string corpus_config_hash(CorpusMode mode, std::size_t count, const Point& pubkey,
                               const CurveParams& params)
{
    Bytes material = ascii_bytes(corpus_mode_name(mode));
    append_bytes(material, ascii_bytes(params.name));
    append_be64(material, count);
    append_bytes(material, encode_point(pubkey, params));
    return digest_hex(sha256(material));
}

} // namespace

Corpus generate_corpus(CorpusMode mode, std::size_t count, const KeyPair& keypair,
                       const std::optional<SetupParams>& setup, const CurveParams& params,
                       EntropySource& rng, unsigned threads)
{
    if (mode == CorpusMode::malicious && !setup)
        throw ValidationError("malicious corpus generation requires setup parameters");

    Corpus corpus;
    corpus.label = mode;
    corpus.curve = params.name;
    corpus.config_hash = corpus_config_hash(mode, count, keypair.Q, params);
    corpus.records.resize(count);
    if (count == 0)
        return corpus;

    // Shard deterministically: worker w signs the contiguous block of
    // records [w*per, ...), with an even block size so kleptogram pairs stay
    // within one shard. The shard count is fixed (not tied to the machine's
    // core count) so a seeded corpus is identical everywhere.
    constexpr std::size_t kShardTarget = 8;
    std::size_t per = (count + kShardTarget - 1) / kShardTarget;
    if (per % 2 != 0)
        per += 1;
    std::size_t shards = (count + per - 1) / per;

    // derive shard seeds from the caller's stream so --seed stays reproducible
    Bytes base_seed = random_bytes(rng, 32);
    Sha256CtrEntropy base(base_seed);

    parallel_for(shards, threads, [&](unsigned, std::size_t shard) {
        Sha256CtrEntropy worker_rng = base.fork(static_cast<std::uint32_t>(shard));
        std::size_t begin = shard * per;
        std::size_t end = std::min(count, begin + per);

        MaliciousSigner signer;
        if (mode == CorpusMode::malicious)
            signer = MaliciousSigner{keypair, KleptoState{*setup, KleptoPhase::round1_pending, 0},
                                     0};
        BigInt constant_nonce;
        if (mode == CorpusMode::biased)
            constant_nonce = derive_deterministic_nonce(keypair.d, ascii_bytes("biased"), params);

        for (std::size_t i = begin; i < end; ++i) {
            // deterministic and biased nonces cannot be re-picked, so a toy-curve
            // s = 0 collision is answered by drawing a different message
            for (;;) {
                Bytes msg = random_bytes(worker_rng, kMessageBytes);
                Signature sig;
                try {
                    switch (mode) {
                    case CorpusMode::honest:
                        sig = sign_with_fresh_nonce(msg, keypair.d, params, worker_rng);
                        break;
                    case CorpusMode::deterministic:
                        sig = sign(msg, keypair.d,
                                   derive_deterministic_nonce(keypair.d, msg, params), params);
                        break;
                    case CorpusMode::malicious:
                        sig = malicious_sign(signer, msg, params, worker_rng);
                        break;
                    case CorpusMode::biased:
                        sig = sign(msg, keypair.d, constant_nonce, params);
                        break;
                    }
                } catch (const RetryNonceError&) {
                    continue;
                }
                corpus.records[i] =
                    SignatureRecord{i, std::move(msg), std::move(sig), keypair.Q};
                break;
            }
        }
    });
    return corpus;
}

namespace {

struct Observables {
    std::vector<double> r_norm;        // r / n
    std::vector<std::uint64_t> r_lead; // leading byte of fixed-width r
    std::vector<double> x_norm;        // x(nonce point) / p
    std::vector<double> serial;        // |r_norm[i+1] - r_norm[i]|
};

Observables extract_observables(const Corpus& corpus, const CurveParams& params, unsigned threads)
{
    const auto& records = corpus.records;
    Observables obs;
    obs.r_norm.resize(records.size());
    obs.r_lead.resize(records.size());
    obs.x_norm.resize(records.size());

    double n_d = mpz_get_d(params.n.get_mpz_t());
    double p_d = mpz_get_d(params.p.get_mpz_t());
    std::size_t width = params.scalar_bytes();

    parallel_for(records.size(), threads, [&](unsigned, std::size_t i) {
        const SignatureRecord& rec = records[i];
        obs.r_norm[i] = mpz_get_d(rec.sig.r.get_mpz_t()) / n_d;
        obs.r_lead[i] = to_bytes_be(rec.sig.r, width)[0];
        Point nonce_point = reconstruct_nonce_point(rec.msg, rec.sig, rec.pubkey, params);
        obs.x_norm[i] = mpz_get_d(nonce_point.x.get_mpz_t()) / p_d;
    });

    obs.serial.reserve(records.size() - 1);
    for (std::size_t i = 0; i + 1 < records.size(); ++i)
        obs.serial.push_back(std::abs(obs.r_norm[i + 1] - obs.r_norm[i]));
    return obs;
}

std::vector<std::uint64_t> byte_histogram(std::span<const std::uint64_t> values)
{
    std::vector<std::uint64_t> hist(256, 0);
    for (std::uint64_t v : values)
        hist[v & 0xff] += 1;
    return hist;
}

StatReport make_report(std::string name, double stat, double p, std::size_t samples, double alpha)
{
    return StatReport{std::move(name), stat, p, samples, alpha, p >= alpha};
}

} // namespace

std::vector<StatReport> third_party_tests(const Corpus& c1, const Corpus& c2,
                                          const CurveParams& params, double alpha,
                                          unsigned threads)
{
    if (c1.curve != params.name || c2.curve != params.name)
        throw ValidationError("corpora were generated on a different curve");
    if (c1.records.size() < 100 || c2.records.size() < 100)
        throw ValidationError("sample too small: the battery needs at least 100 records each");

    Observables o1 = extract_observables(c1, params, threads);
    Observables o2 = extract_observables(c2, params, threads);

    constexpr std::size_t kBatterySize = 4;
    double corrected = alpha / static_cast<double>(kBatterySize);
    std::size_t n = c1.records.size() + c2.records.size();

    std::vector<StatReport> reports;
    KsResult ks_r = ks_two_sample(o1.r_norm, o2.r_norm);
    reports.push_back(make_report("ks:r-normalized", ks_r.statistic, ks_r.p_value, n, corrected));

    Chi2Result chi_r = chi2_two_sample(byte_histogram(o1.r_lead), byte_histogram(o2.r_lead));
    reports.push_back(
        make_report("chi2:r-leading-byte", chi_r.statistic, chi_r.p_value, n, corrected));

    KsResult ks_x = ks_two_sample(o1.x_norm, o2.x_norm);
    reports.push_back(
        make_report("ks:nonce-point-x", ks_x.statistic, ks_x.p_value, n, corrected));

    KsResult ks_serial = ks_two_sample(o1.serial, o2.serial);
    reports.push_back(
        make_report("ks:serial-r-delta", ks_serial.statistic, ks_serial.p_value, n, corrected));

    return reports;
}

DistinguisherReport attacker_distinguisher(const Corpus& corpus, const BigInt& attacker_priv,
                                           const SetupParams& setup, const CurveParams& params,
                                           std::size_t pair_budget, unsigned threads)
{
    DistinguisherReport report;
    if (corpus.records.size() < 2)
        return report;

    std::size_t pair_count = corpus.records.size() - 1;
    if (pair_budget != 0)
        pair_count = std::min(pair_count, pair_budget);
    report.verdicts.resize(pair_count);

    parallel_for(pair_count, threads, [&](unsigned, std::size_t i) {
        std::optional<BigInt> d = attacker_recover_privkey(
            corpus.records[i], corpus.records[i + 1], attacker_priv, setup, params);
        report.verdicts[i] = PairVerdict{i, d.has_value()};
    });

    bool is_malicious_label = corpus.label == CorpusMode::malicious;
    for (const PairVerdict& v : report.verdicts) {
        report.pairs_evaluated += 1;
        bool true_klepto_pair = is_malicious_label && v.first_index % 2 == 0;
        if (true_klepto_pair) {
            report.klepto_pairs += 1;
            report.klepto_recovered += v.recovered ? 1 : 0;
        } else {
            report.nonklepto_pairs += 1;
            report.nonklepto_recovered += v.recovered ? 1 : 0;
        }
        report.verdict_malicious = report.verdict_malicious || v.recovered;
    }
    if (report.klepto_pairs > 0)
        report.detection_rate =
            static_cast<double>(report.klepto_recovered) / static_cast<double>(report.klepto_pairs);
    if (report.nonklepto_pairs > 0)
        report.false_positive_rate = static_cast<double>(report.nonklepto_recovered) /
                                     static_cast<double>(report.nonklepto_pairs);
    return report;
}

} // namespace klepto
