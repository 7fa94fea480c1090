#include "klepto/bigint.hpp"

#include <algorithm>

#include "klepto/error.hpp"

namespace klepto {

std::size_t bit_length(const BigInt& v)
{
    if (v == 0) return 0;
    return mpz_sizeinbase(v.get_mpz_t(), 2);
}

std::size_t byte_length(const BigInt& v)
{
    if (v == 0) return 1;
    return (bit_length(v) + 7) / 8;
}

BigInt mod(const BigInt& a, const BigInt& m)
{
    BigInt r;
    mpz_mod(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
    return r;
}

BigInt mod_add(const BigInt& a, const BigInt& b, const BigInt& m)
{
    return mod(a + b, m);
}

BigInt mod_sub(const BigInt& a, const BigInt& b, const BigInt& m)
{
    return mod(a - b, m);
}

BigInt mod_mul(const BigInt& a, const BigInt& b, const BigInt& m)
{
    return mod(a * b, m);
}

BigInt mod_pow(const BigInt& base, const BigInt& exp, const BigInt& m)
{
    BigInt r;
    mpz_powm(r.get_mpz_t(), base.get_mpz_t(), exp.get_mpz_t(), m.get_mpz_t());
    return r;
}

BigInt mod_inv(const BigInt& a, const BigInt& m)
{
    BigInt r;
    if (mpz_invert(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t()) == 0)
        throw ValidationError("value has no modular inverse");
    return r;
}

Bytes to_bytes_be(const BigInt& v, std::size_t width)
{
    if (v < 0)
        throw ValidationError("cannot serialize a negative integer");
    Bytes out(width, 0);
    if (v == 0)
        return out;
    if (byte_length(v) > width)
        throw ValidationError("integer does not fit the requested width");
    std::size_t count = 0;
    mpz_export(out.data() + (width - byte_length(v)), &count, 1, 1, 1, 0, v.get_mpz_t());
    return out;
}

BigInt from_bytes_be(ByteView data)
{
    BigInt v;
    if (!data.empty())
        mpz_import(v.get_mpz_t(), data.size(), 1, 1, 1, 0, data.data());
    return v;
}

std::string to_hex(const BigInt& v, std::size_t width)
{
    return hex_encode(to_bytes_be(v, width));
}

BigInt bigint_from_hex(std::string_view hex)
{
    return from_bytes_be(hex_decode(hex));
}

} // namespace klepto
