#include "klepto/supervisor.hpp"

#include <chrono>

#include "klepto/error.hpp"

namespace klepto {

void Transcript::record(Direction dir, ProtocolMessage msg)
{
    TranscriptEntry entry;
    entry.seq = entries.size();
    entry.dir = dir;
    entry.msg = std::move(msg);
    if (deterministic_time) {
        entry.timestamp_ms = static_cast<std::int64_t>(entry.seq);
    } else {
        entry.timestamp_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                                 std::chrono::system_clock::now().time_since_epoch())
                                 .count();
    }
    entries.push_back(std::move(entry));
}

const char* reject_reason_name(RejectReason reason)
{
    switch (reason) {
    case RejectReason::none: return "none";
    case RejectReason::commitment_mismatch: return "commitment-mismatch";
    case RejectReason::nonce_mismatch: return "nonce-mismatch";
    case RejectReason::signature_invalid: return "signature-invalid";
    }
    return "unknown";
}

namespace {

Digest commitment_hash(const Point& t_point, const CurveParams& params)
{
    return sha256(encode_point(t_point, params));
}

} // namespace

CommitMsg signer_commit(SignerSession& session, EntropySource& rng, const CurveParams& params)
{
    if (session.phase != SignerPhase::idle)
        throw StateError("signer cannot commit in the current phase");
    BigInt t = random_scalar(rng, params.n);
    Point t_point = scalar_mul(t, params.G, params);
    session.pending_t = std::move(t);
    session.phase = SignerPhase::committed;
    return CommitMsg{commitment_hash(t_point, params)};
}

ChallengeMsg supervisor_challenge(SupervisorSession& session, const CommitMsg& commit, ByteView m,
                                  EntropySource& rng, const CurveParams& params)
{
    if (session.phase != SupervisorPhase::idle)
        throw StateError("supervisor cannot issue a challenge in the current phase");
    BigInt u = random_scalar(rng, params.n);
    session.pending = SupervisorPending{commit.h_t, u, Bytes(m.begin(), m.end())};
    session.phase = SupervisorPhase::challenged;
    return ChallengeMsg{std::move(u)};
}

SignerFinish signer_finish(SignerSession& session, const BigInt& u, ByteView m,
                           const CurveParams& params)
{
    if (session.phase != SignerPhase::committed || !session.pending_t)
        throw StateError("signer has no pending commitment");
    BigInt t = *session.pending_t;
    session.pending_t.reset();
    session.phase = SignerPhase::idle;

    BigInt k = mod_mul(t, u, params.n);
    Point t_point = scalar_mul(t, params.G, params);
    try {
        Signature sig = sign(m, session.keypair.d, k, params);
        return SignerFinish{RevealMsg{std::move(t_point)}, SigMsg{std::move(sig)}};
    } catch (const RetryNonceError&) {
        // k = t*u is co-determined; neither side may pick a replacement
        session.phase = SignerPhase::poisoned;
        throw ProtocolCancelledError("co-generated nonce was rejected, a fresh run is required");
    }
}

SignerFinish signer_finish_cheating(SignerSession& session, const BigInt& u, ByteView m,
                                    KleptoState& klepto, EntropySource& rng,
                                    const CurveParams& params)
{
    if (session.phase != SignerPhase::committed || !session.pending_t)
        throw StateError("signer has no pending commitment");
    (void)u; // the whole point: the challenge is ignored
    BigInt t = *session.pending_t;
    session.pending_t.reset();
    session.phase = SignerPhase::idle;
    Point t_point = scalar_mul(t, params.G, params);

    BigInt k = klepto.phase == KleptoPhase::round1_pending
                   ? klepto_round1(klepto, rng, params).c1
                   : klepto_round2(klepto, rng, params).candidate.c;
    Signature sig = sign(m, session.keypair.d, k, params);
    return SignerFinish{RevealMsg{std::move(t_point)}, SigMsg{std::move(sig)}};
}

ValidationOutcome supervisor_validate(SupervisorSession& session, const Point& t_point,
                                      const Signature& sig, ByteView m, const CurveParams& params)
{
    if (session.phase != SupervisorPhase::challenged || !session.pending)
        throw StateError("supervisor has no pending challenge");
    SupervisorPending pending = std::move(*session.pending);
    session.pending.reset();
    session.phase = SupervisorPhase::idle;

    if (t_point.infinity || !on_curve(t_point, params) ||
        commitment_hash(t_point, params) != pending.h_t)
        return ValidationOutcome::reject(RejectReason::commitment_mismatch);

    Point expected = scalar_mul(pending.u, t_point, params);
    if (expected.infinity || mod(expected.x, params.n) != sig.r)
        return ValidationOutcome::reject(RejectReason::nonce_mismatch);

    if (Bytes(m.begin(), m.end()) != pending.m ||
        !verify(m, sig, session.pubkey, params).accepted())
        return ValidationOutcome::reject(RejectReason::signature_invalid);

    return ValidationOutcome::accept();
}

PrearrangeMsg prearrange(SignerSession& session, std::size_t count, EntropySource& rng,
                         const CurveParams& params)
{
    if (session.phase != SignerPhase::idle)
        throw StateError("signer cannot prearrange in the current phase");
    if (count == 0)
        throw ValidationError("prearrangement needs at least one choice");
    PrearrangeMsg msg;
    msg.hashes.reserve(count);
    session.choice_list.clear();
    session.choice_list.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        BigInt t = random_scalar(rng, params.n);
        msg.hashes.push_back(commitment_hash(scalar_mul(t, params.G, params), params));
        session.choice_list.push_back(std::move(t));
    }
    session.phase = SignerPhase::prearranged;
    return msg;
}

void supervisor_receive_prearrange(SupervisorSession& session, const PrearrangeMsg& msg)
{
    if (session.phase != SupervisorPhase::idle)
        throw StateError("supervisor cannot accept a prearrangement in the current phase");
    if (msg.hashes.empty())
        throw ValidationError("prearrangement needs at least one hash");
    session.hash_list = msg.hashes;
    session.phase = SupervisorPhase::prearranged;
}

SignatureRecord sign_prearranged(SignerSession& signer, SupervisorSession& supervisor, ByteView m,
                                 EntropySource& rng, const CurveParams& params,
                                 Transcript* transcript, KleptoState* cheat_state)
{
    if (signer.phase == SignerPhase::poisoned || supervisor.phase == SupervisorPhase::poisoned)
        throw StateError("session was poisoned by an earlier failure");
    if (signer.phase != SignerPhase::prearranged || supervisor.phase != SupervisorPhase::prearranged)
        throw StateError("both sessions must be in the prearranged phase");
    if (supervisor.hash_list.empty())
        throw ValidationError("prearrangement exhausted");
    if (signer.choice_list.empty())
        throw ValidationError("prearrangement exhausted");

    // supervisor -> signer: (m, u)
    BigInt u = random_scalar(rng, params.n);
    if (transcript)
        transcript->record(Direction::supervisor_to_signer,
                           SignRequestMsg{Bytes(m.begin(), m.end()), u});

    // signer: k = u * t_1, sign, reveal T_1, pop its list
    BigInt t1 = signer.choice_list.front();
    signer.choice_list.erase(signer.choice_list.begin());
    Point t_point = scalar_mul(t1, params.G, params);
    BigInt k = cheat_state ? (cheat_state->phase == KleptoPhase::round1_pending
                                  ? klepto_round1(*cheat_state, rng, params).c1
                                  : klepto_round2(*cheat_state, rng, params).candidate.c)
                           : mod_mul(u, t1, params.n);
    Signature sig;
    try {
        sig = sign(m, signer.keypair.d, k, params);
    } catch (const RetryNonceError&) {
        signer.phase = SignerPhase::poisoned;
        supervisor.phase = SupervisorPhase::poisoned;
        throw ProtocolCancelledError("co-generated nonce was rejected, a fresh run is required");
    }
    if (transcript)
        transcript->record(Direction::signer_to_supervisor, SigWithRevealMsg{sig, t_point});

    // supervisor: commitment, nonce provenance, then standard verification
    const Digest& expected_hash = supervisor.hash_list.front();
    ValidationOutcome outcome = ValidationOutcome::accept();
    if (t_point.infinity || !on_curve(t_point, params) ||
        commitment_hash(t_point, params) != expected_hash)
        outcome = ValidationOutcome::reject(RejectReason::commitment_mismatch);
    else if (mod(scalar_mul(u, t_point, params).x, params.n) != sig.r)
        outcome = ValidationOutcome::reject(RejectReason::nonce_mismatch);
    else if (!verify(m, sig, supervisor.pubkey, params).accepted())
        outcome = ValidationOutcome::reject(RejectReason::signature_invalid);

    if (!outcome.accepted) {
        // cancel: alert the user, keep the supervisor's list head
        signer.phase = SignerPhase::poisoned;
        supervisor.phase = SupervisorPhase::poisoned;
        throw ProtocolCancelledError(std::string("protocol cancelled: ") +
                                     reject_reason_name(outcome.reason));
    }
    supervisor.hash_list.erase(supervisor.hash_list.begin());

    SignatureRecord record;
    record.index = 0;
    record.msg = Bytes(m.begin(), m.end());
    record.sig = std::move(sig);
    record.pubkey = supervisor.pubkey;
    return record;
}

namespace {

struct ReplaySession {
    std::optional<Digest> h_t;
    std::optional<BigInt> u;
    std::optional<Bytes> m;
};

ValidationOutcome replay_checks(const Digest& h_t, const BigInt& u, const Bytes& m,
                                const Point& t_point, const Signature& sig, const Point& pubkey,
                                const CurveParams& params)
{
    if (t_point.infinity || !on_curve(t_point, params) ||
        sha256(encode_point(t_point, params)) != h_t)
        return ValidationOutcome::reject(RejectReason::commitment_mismatch);
    Point expected = scalar_mul(u, t_point, params);
    if (expected.infinity || mod(expected.x, params.n) != sig.r)
        return ValidationOutcome::reject(RejectReason::nonce_mismatch);
    if (!verify(m, sig, pubkey, params).accepted())
        return ValidationOutcome::reject(RejectReason::signature_invalid);
    return ValidationOutcome::accept();
}

} // namespace

ReplayResult replay_transcript(const Transcript& transcript, const Point& pubkey,
                               const CurveParams& params)
{
    ReplayResult result;
    std::vector<Digest> hash_list; // prearranged commitments
    ReplaySession current;
    std::size_t session_index = 0;
    std::optional<Point> pending_reveal;

    auto finish_session = [&](const Point& t_point, const Signature& sig) {
        if (!current.u || !current.m)
            throw ParseError("transcript signature without a preceding challenge");
        Digest h_t;
        if (current.h_t) {
            h_t = *current.h_t;
        } else if (!hash_list.empty()) {
            h_t = hash_list.front();
            hash_list.erase(hash_list.begin());
        } else {
            throw ParseError("transcript signature without a commitment");
        }
        ValidationOutcome outcome =
            replay_checks(h_t, *current.u, *current.m, t_point, sig, pubkey, params);
        result.checks.push_back(ReplayCheck{session_index++, outcome});
        result.all_accepted = result.all_accepted && outcome.accepted;
        current = ReplaySession{};
        pending_reveal.reset();
    };

    for (const TranscriptEntry& entry : transcript.entries) {
        if (std::holds_alternative<CommitMsg>(entry.msg)) {
            current.h_t = std::get<CommitMsg>(entry.msg).h_t;
        } else if (std::holds_alternative<PrearrangeMsg>(entry.msg)) {
            hash_list = std::get<PrearrangeMsg>(entry.msg).hashes;
        } else if (std::holds_alternative<ChallengeMsg>(entry.msg)) {
            current.u = std::get<ChallengeMsg>(entry.msg).u;
        } else if (std::holds_alternative<SignRequestMsg>(entry.msg)) {
            const auto& req = std::get<SignRequestMsg>(entry.msg);
            current.u = req.u;
            current.m = req.m;
        } else if (std::holds_alternative<RevealMsg>(entry.msg)) {
            pending_reveal = std::get<RevealMsg>(entry.msg).t_point;
        } else if (std::holds_alternative<SigMsg>(entry.msg)) {
            if (!pending_reveal)
                throw ParseError("transcript signature without a reveal");
            finish_session(*pending_reveal, std::get<SigMsg>(entry.msg).sig);
        } else if (std::holds_alternative<SigWithRevealMsg>(entry.msg)) {
            const auto& swr = std::get<SigWithRevealMsg>(entry.msg);
            finish_session(swr.t_point, swr.sig);
        }
    }
    return result;
}

} // namespace klepto
