#include "klepto/curve.hpp"

#include "klepto/error.hpp"

namespace klepto {

bool Point::operator==(const Point& other) const
{
    if (infinity || other.infinity)
        return infinity == other.infinity;
    return x == other.x && y == other.y;
}

bool on_curve(const Point& P, const CurveParams& params)
{
    if (P.infinity)
        return true;
    if (P.x < 0 || P.x >= params.p || P.y < 0 || P.y >= params.p)
        return false;
    BigInt lhs = mod_mul(P.y, P.y, params.p);
    BigInt rhs = mod(P.x * P.x * P.x + params.a * P.x + params.b, params.p);
    return lhs == rhs;
}

namespace {

void require_on_curve(const Point& P, const CurveParams& params)
{
    if (!on_curve(P, params))
        throw ValidationError("point is not on curve " + params.name);
}

// Group law without input validation; callers check once up front.
Point add_unchecked(const Point& P, const Point& Q, const CurveParams& params)
{
    if (P.infinity) return Q;
    if (Q.infinity) return P;

    BigInt slope;
    if (P.x == Q.x) {
        if (mod_add(P.y, Q.y, params.p) == 0)
            return Point::make_infinity();
        // doubling: slope = (3x^2 + a) / 2y
        BigInt num = mod(3 * P.x * P.x + params.a, params.p);
        slope = mod_mul(num, mod_inv(mod(2 * P.y, params.p), params.p), params.p);
    } else {
        BigInt num = mod_sub(Q.y, P.y, params.p);
        BigInt den = mod_sub(Q.x, P.x, params.p);
        slope = mod_mul(num, mod_inv(den, params.p), params.p);
    }
    BigInt x3 = mod(slope * slope - P.x - Q.x, params.p);
    BigInt y3 = mod(slope * (P.x - x3) - P.y, params.p);
    return Point::affine(std::move(x3), std::move(y3));
}

} // namespace

Point point_add(const Point& P, const Point& Q, const CurveParams& params)
{
    require_on_curve(P, params);
    require_on_curve(Q, params);
    return add_unchecked(P, Q, params);
}

Point point_neg(const Point& P, const CurveParams& params)
{
    require_on_curve(P, params);
    if (P.infinity)
        return P;
    return Point::affine(P.x, mod(-P.y, params.p));
}

Point point_sub(const Point& P, const Point& Q, const CurveParams& params)
{
    return point_add(P, point_neg(Q, params), params);
}

Point scalar_mul(const BigInt& k, const Point& P, const CurveParams& params)
{
    if (k < 0)
        throw ValidationError("scalar must be non-negative");
    require_on_curve(P, params);
    Point result = Point::make_infinity();
    if (k == 0 || P.infinity)
        return result;
    for (std::size_t i = bit_length(k); i-- > 0;) {
        result = add_unchecked(result, result, params);
        if (mpz_tstbit(k.get_mpz_t(), i))
            result = add_unchecked(result, P, params);
    }
    return result;
}

BigInt point_order(const Point& P, const CurveParams& params)
{
    require_on_curve(P, params);
    if (P.infinity)
        return 1;
    if (scalar_mul(params.n, P, params).infinity)
        return params.n;
    // unreachable for the registered curves (cofactor 1)
    throw ValidationError("point lies outside the order-n subgroup");
}

Bytes encode_point(const Point& P, const CurveParams& params)
{
    if (P.infinity)
        throw ValidationError("cannot encode identity");
    require_on_curve(P, params);
    Bytes out;
    out.reserve(1 + params.field_bytes());
    out.push_back(mpz_odd_p(P.y.get_mpz_t()) ? 0x03 : 0x02);
    append_bytes(out, to_bytes_be(P.x, params.field_bytes()));
    return out;
}

Point decode_point(ByteView data, const CurveParams& params)
{
    if (data.size() != 1 + params.field_bytes())
        throw ParseError("point encoding has wrong length for curve " + params.name);
    if (data[0] != 0x02 && data[0] != 0x03)
        throw ParseError("point encoding has unknown prefix byte");
    BigInt x = from_bytes_be(data.subspan(1));
    if (x >= params.p)
        throw ValidationError("x coordinate exceeds the field prime");
    BigInt rhs = mod(x * x * x + params.a * x + params.b, params.p);
    // both registered curves have p = 3 (mod 4), so sqrt is a single power
    BigInt y = mod_pow(rhs, (params.p + 1) / 4, params.p);
    if (mod_mul(y, y, params.p) != rhs)
        throw ValidationError("x coordinate is not on the curve");
    bool want_odd = data[0] == 0x03;
    if (mpz_odd_p(y.get_mpz_t()) != static_cast<int>(want_odd))
        y = mod(-y, params.p);
    return Point::affine(std::move(x), std::move(y));
}

std::string point_to_hex(const Point& P, const CurveParams& params)
{
    return hex_encode(encode_point(P, params));
}

Point point_from_hex(std::string_view hex, const CurveParams& params)
{
    return decode_point(hex_decode(hex), params);
}

namespace {

CurveParams make_secp256k1()
{
    CurveParams c;
    c.name = "secp256k1";
    c.p = bigint_from_hex("fffffffffffffffffffffffffffffffffffffffffffffffffffffffefffffc2f");
    c.a = 0;
    c.b = 7;
    c.G = Point::affine(
        bigint_from_hex("79be667ef9dcbbac55a06295ce870b07029bfcdb2dce28d959f2815b16f81798"),
        bigint_from_hex("483ada7726a3c4655da4fbfc0e1108a8fd17b448a68554199c47d08ffb10d4b8"));
    c.n = bigint_from_hex("fffffffffffffffffffffffffffffffebaaedce6af48a03bbfd25e8cd0364141");
    c.cofactor = 1;
    return c;
}

// Output of tools/toy_curve_search: smallest prime p = 3 (mod 4) such that
// y^2 = x^3 + 7 over F_p has prime order > p with 7 a quadratic non-residue.
// n > p keeps r = x(kG) unreduced and r = 0 unreachable, which the exhaustive
// tests rely on.
CurveParams make_toy()
{
    CurveParams c;
    c.name = "toy";
    c.p = 823;
    c.a = 0;
    c.b = 7;
    c.G = Point::affine(1, 255);
    c.n = 829;
    c.cofactor = 1;
    return c;
}

} // namespace

const CurveParams& registry_get(std::string_view name)
{
    static const CurveParams secp256k1 = make_secp256k1();
    static const CurveParams toy = make_toy();
    if (name == "secp256k1")
        return secp256k1;
    if (name == "toy")
        return toy;
    throw ValidationError("unknown curve: " + std::string(name));
}

std::vector<std::string> registry_names()
{
    return {"secp256k1", "toy"};
}

} // namespace klepto
