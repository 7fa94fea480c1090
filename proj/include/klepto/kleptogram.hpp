#pragma once

#include <cstdint>
#include <optional>

#include "klepto/curve.hpp"
#include "klepto/rng.hpp"

namespace klepto {

// Attacker constants baked into the malicious implementation. The prng seed
// is the shared secret between the implementation and the attacker's recovery
// tool; it never appears in any transcript or published value.
struct SetupParams {
    BigInt alpha;
    BigInt beta;
    BigInt omega; // must be odd
    Point attacker_pub;
    Bytes prng_seed;
};

SetupParams make_default_setup(Point attacker_pub, Bytes prng_seed);

enum class KleptoPhase {
    round1_pending,
    round2_pending,
};

// The malicious signer's persisted state: which round is next and, between
// rounds, the stored c1.
struct KleptoState {
    SetupParams setup;
    KleptoPhase phase = KleptoPhase::round1_pending;
    BigInt stored_c1;
};

// One round-2 derivation: the hidden point Z, the chosen bit t, and the
// nonce c = prng(Z, retry). Kept so a downstream r=0/s=0 rejection can be
// answered by re-deriving with retry+1 over the same Z.
struct KleptoCandidate {
    Point z;
    bool t = false;
    std::uint32_t retry = 0;
    BigInt c;
};

// The attacker scans retries 0..max_retry during recovery; generation aborts
// rather than exceed it (never observed in practice).
inline constexpr std::uint32_t kDefaultMaxRetry = 15;

// Seeded PRNG R of the construction: hash_to_scalar over
// seed || encode_point(Z) || be32(retry). Deterministic in all inputs.
BigInt klepto_prng(const Point& z, ByteView seed, std::uint32_t retry, const CurveParams& params);

struct Round1Result {
    BigInt c1;
    Point m1; // c1 * G
};

// Picks c1 uniform in [1, n-1], stores it, moves the state to round 2.
Round1Result klepto_round1(KleptoState& state, EntropySource& rng, const CurveParams& params);

struct Round2Result {
    KleptoCandidate candidate;
    Point m2; // c * G
};

// Z = (c1 - omega*t)G + (-alpha*c1 - beta)*Q_A with a fresh random bit t,
// c2 = prng(Z, 0). Moves the state back to round 1. If Z degenerates to
// infinity the other t is tried first; both failing is a hard error that
// only the toy curve could ever reach.
Round2Result klepto_round2(KleptoState& state, EntropySource& rng, const CurveParams& params);

// retry+1 with the same Z; used when the derived nonce made sign() reject.
void klepto_rederive(KleptoCandidate& candidate, ByteView seed, const CurveParams& params);

// Attacker side: R = alpha*M1 + beta*G, Z1 = M1 - d_A*R, Z2 = Z1 - omega*G.
// Returns the scalar c with c*G = M2 among prng(Z_t, retry) candidates, or
// nullopt — the expected outcome for honest signature pairs.
std::optional<BigInt> klepto_recover(const Point& m1, const Point& m2, const BigInt& attacker_priv,
                                     const BigInt& alpha, const BigInt& beta, const BigInt& omega,
                                     ByteView seed, std::uint32_t max_retry,
                                     const CurveParams& params);

std::optional<BigInt> klepto_recover(const Point& m1, const Point& m2, const BigInt& attacker_priv,
                                     const SetupParams& setup, std::uint32_t max_retry,
                                     const CurveParams& params);

// Orders of G1 = (-d_A*beta - omega)G, G2 = (-d_A*beta)G, G3 = (1 - d_A*alpha)G.
// All three should be n; an order of 1 collapses the reachable set of Z and
// makes the covert channel statistically visible.
struct SetupStrengthReport {
    BigInt order_g1;
    BigInt order_g2;
    BigInt order_g3;
    bool degenerate = false;
    std::string detail;
};

SetupStrengthReport check_setup_strength(const SetupParams& setup, const BigInt& attacker_priv,
                                         const CurveParams& params);

} // namespace klepto
