#pragma once

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "klepto/ecdsa.hpp"
#include "klepto/kleptogram.hpp"
#include "klepto/setup_signer.hpp"
#include "klepto/sha256.hpp"

namespace klepto {

// Wire messages of the co-signing protocol.
struct CommitMsg {
    Digest h_t{};
};

struct ChallengeMsg {
    BigInt u;
};

struct RevealMsg {
    Point t_point;
};

struct SigMsg {
    Signature sig;
};

struct PrearrangeMsg {
    std::vector<Digest> hashes;
};

struct SignRequestMsg {
    Bytes m;
    BigInt u;
};

struct SigWithRevealMsg {
    Signature sig;
    Point t_point;
};

using ProtocolMessage = std::variant<CommitMsg, ChallengeMsg, RevealMsg, SigMsg, PrearrangeMsg,
                                     SignRequestMsg, SigWithRevealMsg>;

enum class Direction {
    signer_to_supervisor,
    supervisor_to_signer,
};

struct TranscriptEntry {
    std::uint64_t seq = 0;
    Direction dir = Direction::signer_to_supervisor;
    ProtocolMessage msg;
    std::int64_t timestamp_ms = 0;
};

struct Transcript {
    std::vector<TranscriptEntry> entries;
    // with deterministic_time the timestamp equals the sequence number, so
    // seeded runs serialize byte-identically
    bool deterministic_time = false;

    void record(Direction dir, ProtocolMessage msg);
};

enum class SignerPhase {
    idle,
    committed,  // t pending, waiting for the challenge
    prearranged,
    poisoned,
};

struct SignerSession {
    KeyPair keypair;
    std::optional<BigInt> pending_t;
    std::vector<BigInt> choice_list; // prearranged t_i, consumed from the front
    SignerPhase phase = SignerPhase::idle;
};

enum class SupervisorPhase {
    idle,
    challenged, // commit received, challenge issued
    prearranged,
    poisoned,
};

struct SupervisorPending {
    Digest h_t{};
    BigInt u;
    Bytes m;
};

struct SupervisorSession {
    Point pubkey;
    std::optional<SupervisorPending> pending;
    std::vector<Digest> hash_list; // prearranged commitments, consumed from the front
    SupervisorPhase phase = SupervisorPhase::idle;
};

enum class RejectReason {
    none,
    commitment_mismatch, // SHA-256(encode(T)) != h_T
    nonce_mismatch,      // r != x(u*T) mod n
    signature_invalid,   // standard ECDSA verification failed
};

struct ValidationOutcome {
    bool accepted = false;
    RejectReason reason = RejectReason::none;

    static ValidationOutcome accept() { return {true, RejectReason::none}; }
    static ValidationOutcome reject(RejectReason r) { return {false, r}; }
};

const char* reject_reason_name(RejectReason reason);

// --- interactive variant -------------------------------------------------

// Picks t, stores it, emits h_T = SHA-256(encode(tG)).
CommitMsg signer_commit(SignerSession& session, EntropySource& rng, const CurveParams& params);

// Records the commitment and the message, picks u uniform in [1, n-1].
ChallengeMsg supervisor_challenge(SupervisorSession& session, const CommitMsg& commit, ByteView m,
                                  EntropySource& rng, const CurveParams& params);

struct SignerFinish {
    RevealMsg reveal;
    SigMsg sig;
};

// k = t*u mod n, then a standard signature. A RetryNonceError aborts the run
// (k is not signer-choosable) as ProtocolCancelledError.
SignerFinish signer_finish(SignerSession& session, const BigInt& u, ByteView m,
                           const CurveParams& params);

// Cheating variant used by tests and the --cheat demo: reveals the committed
// T honestly but signs with a kleptogram nonce, ignoring u.
SignerFinish signer_finish_cheating(SignerSession& session, const BigInt& u, ByteView m,
                                    KleptoState& klepto, EntropySource& rng,
                                    const CurveParams& params);

// Accepts iff the commitment opens to T, r = x(u*T) mod n, and the signature
// verifies under the session public key. The checks run in that order and
// the outcome names the first failure.
ValidationOutcome supervisor_validate(SupervisorSession& session, const Point& t_point,
                                      const Signature& sig, ByteView m,
                                      const CurveParams& params);

// --- prearranged variant -------------------------------------------------

// Generates t_1..t_count, stores them, emits their commitment hashes in order.
PrearrangeMsg prearrange(SignerSession& session, std::size_t count, EntropySource& rng,
                         const CurveParams& params);

void supervisor_receive_prearrange(SupervisorSession& session, const PrearrangeMsg& msg);

// One prearranged signature: the supervisor picks u and sends (m, u); the
// signer consumes the head t_1 with k = u*t_1 mod n and replies (sig, T_1);
// the supervisor re-runs all three checks. Both lists pop on success; on any
// failure the protocol is cancelled, the supervisor keeps its list head, and
// both sessions are poisoned. When cheat_state is non-null the signer
// substitutes a kleptogram nonce (demo of the attack being caught).
SignatureRecord sign_prearranged(SignerSession& signer, SupervisorSession& supervisor, ByteView m,
                                 EntropySource& rng, const CurveParams& params,
                                 Transcript* transcript = nullptr,
                                 KleptoState* cheat_state = nullptr);

// --- offline replay ------------------------------------------------------

struct ReplayCheck {
    std::size_t session = 0;
    ValidationOutcome outcome;
};

struct ReplayResult {
    std::vector<ReplayCheck> checks;
    bool all_accepted = true;
};

// Re-runs every supervisor check recorded in a transcript against a public
// key. Supports both the interactive and the prearranged message shapes.
ReplayResult replay_transcript(const Transcript& transcript, const Point& pubkey,
                               const CurveParams& params);

} // namespace klepto
