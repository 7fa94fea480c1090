#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "klepto/ecdsa.hpp"
#include "klepto/kleptogram.hpp"
#include "klepto/sha256.hpp"

namespace klepto {

// Black-box ECDSA signer whose nonces follow the kleptogram: signatures with
// even counter (1st, 3rd, ... emitted) carry round-1 nonces, the following
// ones carry round-2 nonces. Every output is a specification-valid signature.
struct MaliciousSigner {
    KeyPair keypair;
    KleptoState klepto;
    std::uint64_t signature_counter = 0;
};

Signature malicious_sign(MaliciousSigner& signer, ByteView msg, const CurveParams& params,
                         EntropySource& rng, std::uint32_t max_retry = kDefaultMaxRetry);

struct SignatureRecord {
    std::uint64_t index = 0;
    Bytes msg;
    Signature sig;
    Point pubkey;
};

// Reconstructs M1, M2 from the two signatures via the verification equation,
// runs the kleptogram recovery for k2, extracts d from the second signature,
// and returns it only if d*G matches the records' public key.
std::optional<BigInt> attacker_recover_privkey(const SignatureRecord& rec1,
                                               const SignatureRecord& rec2,
                                               const BigInt& attacker_priv,
                                               const SetupParams& setup, const CurveParams& params,
                                               std::uint32_t max_retry = kDefaultMaxRetry);

struct RecoveredKey {
    Point pubkey;
    BigInt d;
};

struct ScanResult {
    std::vector<RecoveredKey> keys;
    // diagnostic only: with parallel workers and early exit on a hit, the
    // exact count can vary between runs
    std::size_t pairs_tried = 0;
    std::size_t skipped_records = 0; // malformed or non-verifying
};

// Groups records by public key and tries every consecutive pair in each
// group (sliding window, so the attacker needs no phase knowledge). A key is
// reported once; its group is not scanned further after a hit.
ScanResult scan_signature_log(std::span<const SignatureRecord> log, const BigInt& attacker_priv,
                              const SetupParams& setup, const CurveParams& params,
                              std::uint32_t max_retry = kDefaultMaxRetry, unsigned threads = 0);

// SHA-256 applied twice to the compressed public key.
using AddressBytes = Digest;
AddressBytes derive_address(const Point& q, const CurveParams& params);

struct TxInput {
    Digest prev_txid{};
    AddressBytes address{};
};

struct TxOutput {
    AddressBytes address{};
    std::uint64_t amount_satoshi = 0;
};

// Message-to-sign abstraction of a transaction; no script, no fee logic.
struct SimpleTransaction {
    std::vector<TxInput> inputs;
    std::vector<TxOutput> outputs;
};

// Canonical bytes: "STX1" || be32(#in) || (txid || address)* || be32(#out)
// || (address || be64(amount))*.
Bytes serialize_transaction(const SimpleTransaction& tx);

// Per-input signing payload: serialized transaction || be32(input_index).
Bytes transaction_signing_payload(const SimpleTransaction& tx, std::uint32_t input_index);

enum class SignMode {
    honest,
    malicious,
    deterministic,
};

// Keyed signing contexts, looked up by address. The klepto state of each
// entry persists across inputs and transactions, which is what makes two
// same-address inputs in one transaction leak the key.
class Wallet {
public:
    // setup required for malicious signing with this key
    void add_key(KeyPair keypair, std::optional<SetupParams> setup, const CurveParams& params);

    std::vector<SignatureRecord> sign_transaction(const SimpleTransaction& tx, SignMode mode,
                                                  const CurveParams& params, EntropySource& rng);

    const KeyPair& key_for(const AddressBytes& address) const;
    std::vector<AddressBytes> addresses() const;

private:
    struct Entry {
        KeyPair keypair;
        std::optional<MaliciousSigner> malicious;
    };
    std::map<AddressBytes, Entry> entries_;
    std::uint64_t next_index_ = 0;
};

} // namespace klepto
