#pragma once

#include <optional>
#include <string>
#include <vector>

#include "klepto/setup_signer.hpp"
#include "klepto/stats.hpp"

namespace klepto {

enum class CorpusMode {
    honest,
    malicious,
    deterministic,
    biased, // constant-nonce pathological corpus, power check for the battery
};

const char* corpus_mode_name(CorpusMode mode);

struct Corpus {
    CorpusMode label = CorpusMode::honest;
    std::string curve;
    std::vector<SignatureRecord> records;
    std::string config_hash; // hash of the generation configuration
};

// count signatures over fresh random 32-byte messages. Malicious mode needs
// the setup; generation shards across workers, each owning its signer state,
// so pair alignment is preserved within a shard.
Corpus generate_corpus(CorpusMode mode, std::size_t count, const KeyPair& keypair,
                       const std::optional<SetupParams>& setup, const CurveParams& params,
                       EntropySource& rng, unsigned threads = 0);

// Third-party battery over nonce-derived observables only: KS on normalized
// r, chi-square on the leading byte of r, KS on x of the reconstructed nonce
// point, and KS on |delta r| between consecutive signatures (serial test).
// Thresholds are Bonferroni-corrected from alpha.
//
// The battery works at the distribution level. A test that resolves
// individual group elements would genuinely detect the kleptogram on the toy
// curve at scale: the round-2 nonce is a fixed function of ~n inputs, so its
// image covers only ~(1 - 1/e) of the group. On secp256k1 that structure is
// far below any feasible sample size.
std::vector<StatReport> third_party_tests(const Corpus& c1, const Corpus& c2,
                                          const CurveParams& params, double alpha = 0.001,
                                          unsigned threads = 0);

struct PairVerdict {
    std::size_t first_index = 0; // position in the corpus of the pair's first record
    bool recovered = false;
};

struct DistinguisherReport {
    bool verdict_malicious = false;
    std::size_t pairs_evaluated = 0;
    std::size_t klepto_pairs = 0;      // ground truth from the corpus label
    std::size_t klepto_recovered = 0;
    std::size_t nonklepto_pairs = 0;
    std::size_t nonklepto_recovered = 0;
    double detection_rate = 0.0;      // klepto_recovered / klepto_pairs
    double false_positive_rate = 0.0; // nonklepto_recovered / nonklepto_pairs
    std::vector<PairVerdict> verdicts;
};

// Blind recovery over consecutive (sliding) pairs, up to pair_budget of
// them. Rates are computed against the corpus label: in a malicious corpus
// the pairs starting at even positions are the true kleptogram pairs.
DistinguisherReport attacker_distinguisher(const Corpus& corpus, const BigInt& attacker_priv,
                                           const SetupParams& setup, const CurveParams& params,
                                           std::size_t pair_budget = 2000, unsigned threads = 0);

} // namespace klepto
