#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <string>
#include <string_view>

#include "klepto/bytes.hpp"

namespace klepto {

// Arbitrary-precision integer. Field elements and scalars are plain BigInt
// values; the operations that consume them enforce the relevant reduction.
using BigInt = mpz_class;

std::size_t bit_length(const BigInt& v);  // bit_length(0) == 0
std::size_t byte_length(const BigInt& v); // byte_length(0) == 1

// Canonical residue in [0, m), also for negative a.
BigInt mod(const BigInt& a, const BigInt& m);
BigInt mod_add(const BigInt& a, const BigInt& b, const BigInt& m);
BigInt mod_sub(const BigInt& a, const BigInt& b, const BigInt& m);
BigInt mod_mul(const BigInt& a, const BigInt& b, const BigInt& m);
BigInt mod_pow(const BigInt& base, const BigInt& exp, const BigInt& m);

// Throws ValidationError when a has no inverse mod m.
BigInt mod_inv(const BigInt& a, const BigInt& m);

// Fixed-width big-endian. Throws ValidationError if v is negative or too wide.
Bytes to_bytes_be(const BigInt& v, std::size_t width);
BigInt from_bytes_be(ByteView data);

// Fixed-width lowercase hex (2*width characters).
std::string to_hex(const BigInt& v, std::size_t width);
BigInt bigint_from_hex(std::string_view hex);

} // namespace klepto
