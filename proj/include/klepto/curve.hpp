#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "klepto/bigint.hpp"
#include "klepto/bytes.hpp"

namespace klepto {

// Affine point on a short-Weierstrass curve, or the point at infinity.
struct Point {
    BigInt x;
    BigInt y;
    bool infinity = true;

    static Point make_infinity() { return Point{}; }
    static Point affine(BigInt px, BigInt py) { return Point{std::move(px), std::move(py), false}; }

    bool operator==(const Point& other) const;
    bool operator!=(const Point& other) const { return !(*this == other); }
};

// y^2 = x^3 + a*x + b over F_p, with a generator G of prime order n.
//
// This library deliberately uses affine coordinates with a modular inversion
// per group operation, and none of it is constant-time. It is an attack
// laboratory, not a production signer; do not feed it keys you care about.
struct CurveParams {
    std::string name;
    BigInt p;
    BigInt a;
    BigInt b;
    Point G;
    BigInt n;
    unsigned cofactor = 1;

    std::size_t field_bytes() const { return byte_length(p); }
    std::size_t scalar_bytes() const { return byte_length(n); }
};

bool on_curve(const Point& P, const CurveParams& params);

// Group law. Inputs are validated; off-curve points raise ValidationError.
Point point_add(const Point& P, const Point& Q, const CurveParams& params);
Point point_neg(const Point& P, const CurveParams& params);
Point point_sub(const Point& P, const Point& Q, const CurveParams& params);

// Double-and-add over the bits of k, k >= 0. scalar_mul(0, P) is infinity.
Point scalar_mul(const BigInt& k, const Point& P, const CurveParams& params);

// Smallest m > 0 with m*P = infinity. Both registered curves have cofactor 1
// and prime n, so the result is 1 or n.
BigInt point_order(const Point& P, const CurveParams& params);

// Compressed encoding: one parity byte (02 even y / 03 odd y) followed by x
// as big-endian of width field_bytes(). Infinity cannot be encoded.
Bytes encode_point(const Point& P, const CurveParams& params);
Point decode_point(ByteView data, const CurveParams& params);

std::string point_to_hex(const Point& P, const CurveParams& params);
Point point_from_hex(std::string_view hex, const CurveParams& params);

// Registered curves: "secp256k1" (the published standard constants) and
// "toy" (y^2 = x^3 + 7 over F_823, group order 829, found by the shipped
// search tool; small enough for exhaustive oracles).
const CurveParams& registry_get(std::string_view name);
std::vector<std::string> registry_names();

} // namespace klepto
