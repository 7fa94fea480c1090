#include "klepto/ecdsa.hpp"

#include "klepto/error.hpp"

namespace klepto {

namespace {

void require_scalar_range(const BigInt& v, const CurveParams& params, const char* what)
{
    if (v <= 0 || v >= params.n)
        throw ValidationError(std::string(what) + " must lie in [1, n-1]");
}

void require_pubkey(const Point& Q, const CurveParams& params)
{
    if (Q.infinity)
        throw ValidationError("public key cannot be the identity");
    if (!on_curve(Q, params))
        throw ValidationError("public key is not on curve " + params.name);
}

} // namespace

BigInt message_scalar(ByteView msg, const CurveParams& params)
{
    Digest h = sha256(msg);
    return mod(from_bytes_be(ByteView(h.data(), h.size())), params.n);
}

KeyPair keygen(EntropySource& rng, const CurveParams& params)
{
    BigInt d = random_scalar(rng, params.n);
    return KeyPair{d, scalar_mul(d, params.G, params)};
}

Signature sign(ByteView msg, const BigInt& d, const BigInt& k, const CurveParams& params)
{
    require_scalar_range(d, params, "private key");
    require_scalar_range(k, params, "nonce");
    Point R = scalar_mul(k, params.G, params);
    BigInt r = mod(R.x, params.n);
    if (r == 0)
        throw RetryNonceError{};
    BigInt e = message_scalar(msg, params);
    BigInt s = mod_mul(mod_inv(k, params.n), e + d * r, params.n);
    if (s == 0)
        throw RetryNonceError{};
    return Signature{std::move(r), std::move(s)};
}

Signature sign_with_fresh_nonce(ByteView msg, const BigInt& d, const CurveParams& params,
                                EntropySource& rng)
{
    for (;;) {
        try {
            return sign(msg, d, random_scalar(rng, params.n), params);
        } catch (const RetryNonceError&) {
        }
    }
}

VerifyResult verify(ByteView msg, const Signature& sig, const Point& Q, const CurveParams& params)
{
    require_pubkey(Q, params);
    if (sig.r <= 0 || sig.r >= params.n || sig.s <= 0 || sig.s >= params.n)
        return VerifyResult{VerifyStatus::reject_range};
    BigInt e = message_scalar(msg, params);
    BigInt w = mod_inv(sig.s, params.n);
    Point R = point_add(scalar_mul(mod_mul(e, w, params.n), params.G, params),
                        scalar_mul(mod_mul(sig.r, w, params.n), Q, params), params);
    if (R.infinity)
        return VerifyResult{VerifyStatus::reject_mismatch};
    if (mod(R.x, params.n) != sig.r)
        return VerifyResult{VerifyStatus::reject_mismatch};
    return VerifyResult{VerifyStatus::accept};
}

Point reconstruct_nonce_point(ByteView msg, const Signature& sig, const Point& Q,
                              const CurveParams& params)
{
    if (!verify(msg, sig, Q, params).accepted())
        throw ValidationError("cannot reconstruct nonce point from a non-verifying signature");
    BigInt e = message_scalar(msg, params);
    BigInt w = mod_inv(sig.s, params.n);
    return point_add(scalar_mul(mod_mul(e, w, params.n), params.G, params),
                     scalar_mul(mod_mul(sig.r, w, params.n), Q, params), params);
}

BigInt derive_deterministic_nonce(const BigInt& d, ByteView msg, const CurveParams& params)
{
    require_scalar_range(d, params, "private key");
    Bytes prefix = to_bytes_be(d, params.scalar_bytes());
    Digest mh = sha256(msg);
    append_bytes(prefix, ByteView(mh.data(), mh.size()));
    return hash_to_scalar(prefix, params.n);
}

BigInt extract_key_from_known_nonce(ByteView msg, const Signature& sig, const BigInt& k,
                                    const CurveParams& params)
{
    if (sig.r == 0)
        throw ValidationError("cannot invert r = 0");
    require_scalar_range(k, params, "nonce");
    BigInt e = message_scalar(msg, params);
    // s = k^-1 (e + d r)  =>  d = (s k - e) r^-1
    return mod_mul(mod_sub(sig.s * k, e, params.n), mod_inv(sig.r, params.n), params.n);
}

LinearRelationKey extract_key_from_linear_relation(ByteView msg1, const Signature& sig1,
                                                   ByteView msg2, const Signature& sig2,
                                                   const BigInt& a, const BigInt& b,
                                                   const CurveParams& params)
{
    if (mod(a, params.n) == 0)
        throw ValidationError("degenerate relation");
    if (sig1.r == 0 || sig1.s == 0 || sig2.r == 0 || sig2.s == 0)
        throw ValidationError("signature component is zero");
    BigInt e1 = message_scalar(msg1, params);
    BigInt e2 = message_scalar(msg2, params);
    // substitute k1 = s1^-1 (e1 + d r1) into s2 (a k1 + b) = e2 + d r2:
    //   d (a s2 s1^-1 r1 - r2) = e2 - s2 b - a s2 s1^-1 e1
    BigInt s1_inv = mod_inv(sig1.s, params.n);
    BigInt a_s2_s1inv = mod_mul(mod_mul(a, sig2.s, params.n), s1_inv, params.n);
    BigInt denom = mod_sub(mod_mul(a_s2_s1inv, sig1.r, params.n), sig2.r, params.n);
    if (denom == 0)
        throw ValidationError("degenerate relation");
    BigInt numer =
        mod_sub(mod_sub(e2, sig2.s * b, params.n), mod_mul(a_s2_s1inv, e1, params.n), params.n);
    BigInt d = mod_mul(numer, mod_inv(denom, params.n), params.n);
    BigInt k1 = mod_mul(s1_inv, e1 + d * sig1.r, params.n);
    return LinearRelationKey{std::move(d), std::move(k1)};
}

std::string signature_to_hex(const Signature& sig, const CurveParams& params)
{
    return to_hex(sig.r, params.scalar_bytes()) + to_hex(sig.s, params.scalar_bytes());
}

Signature signature_from_hex(std::string_view hex, const CurveParams& params)
{
    if (hex.size() != 4 * params.scalar_bytes())
        throw ParseError("signature hex has wrong length for curve " + params.name);
    std::size_t half = hex.size() / 2;
    return Signature{bigint_from_hex(hex.substr(0, half)), bigint_from_hex(hex.substr(half))};
}

} // namespace klepto
