#pragma once

#include <string>

#include "klepto/curve.hpp"
#include "klepto/rng.hpp"

namespace klepto {

struct KeyPair {
    BigInt d; // private, in [1, n-1]
    Point Q;  // public, Q = d*G
};

struct Signature {
    BigInt r;
    BigInt s;

    bool operator==(const Signature& other) const { return r == other.r && s == other.s; }
    bool operator!=(const Signature& other) const { return !(*this == other); }
};

enum class VerifyStatus {
    accept,
    reject_range,    // r or s outside [1, n-1]
    reject_mismatch, // r != x(R') mod n
};

struct VerifyResult {
    VerifyStatus status = VerifyStatus::reject_mismatch;
    bool accepted() const { return status == VerifyStatus::accept; }
};

// e = int(SHA-256(msg)) mod n.
BigInt message_scalar(ByteView msg, const CurveParams& params);

// d uniform in [1, n-1] by rejection sampling, Q = d*G.
KeyPair keygen(EntropySource& rng, const CurveParams& params);

// r = x(kG) mod n, s = k^-1 (e + d*r) mod n. Throws RetryNonceError when
// r = 0 or s = 0; the caller controls how a replacement nonce is chosen.
Signature sign(ByteView msg, const BigInt& d, const BigInt& k, const CurveParams& params);

// Convenience loop for honest signers: fresh random k until sign() succeeds.
Signature sign_with_fresh_nonce(ByteView msg, const BigInt& d, const CurveParams& params,
                                EntropySource& rng);

// R' = s^-1*e*G + s^-1*r*Q; accept iff r = x(R') mod n.
VerifyResult verify(ByteView msg, const Signature& sig, const Point& Q, const CurveParams& params);

// R' from the verification equation equals the signer's kG exactly (full
// point, both coordinates). Requires a verifying signature.
Point reconstruct_nonce_point(ByteView msg, const Signature& sig, const Point& Q,
                              const CurveParams& params);

// k = hash_to_scalar(d_bytes || SHA256(msg), n); a pure function of (d, msg, curve).
BigInt derive_deterministic_nonce(const BigInt& d, ByteView msg, const CurveParams& params);

// d = (s*k - e) * r^-1 mod n, the inverse of the signing equation.
BigInt extract_key_from_known_nonce(ByteView msg, const Signature& sig, const BigInt& k,
                                    const CurveParams& params);

struct LinearRelationKey {
    BigInt d;
    BigInt k1;
};

// Solves s1*k1 = e1 + d*r1 and s2*(a*k1 + b) = e2 + d*r2 for (d, k1), given
// nonces related by k2 = a*k1 + b mod n. Throws ValidationError("degenerate
// relation") when the system is singular.
LinearRelationKey extract_key_from_linear_relation(ByteView msg1, const Signature& sig1,
                                                   ByteView msg2, const Signature& sig2,
                                                   const BigInt& a, const BigInt& b,
                                                   const CurveParams& params);

// r || s as fixed-width big-endian hex, width of n each.
std::string signature_to_hex(const Signature& sig, const CurveParams& params);
Signature signature_from_hex(std::string_view hex, const CurveParams& params);

} // namespace klepto
