// Brute-force search for the registered toy curve.
//
// Candidates are curves y^2 = x^3 + 7 over F_p that mirror the secp256k1
// shape while staying small enough for exhaustive oracles. A prime p
// qualifies when:
//   - p = 3 (mod 4), so modular square roots are a single exponentiation
//     and compressed point decoding stays trivial,
//   - 7 is a quadratic non-residue mod p, so x = 0 is not on the curve and
//     r = x(kG) mod n can never be zero,
//   - the group order n is prime (cofactor 1, every point generates), and
//   - n > p, so r = x(kG) needs no reduction at all.
//
// The generator is the point with the smallest x, taking the smaller y.
// The first hit is what src/curve.cpp registers as "toy".

#include <cstdint>
#include <cstdio>
#include <cstdlib>

namespace {

using u64 = std::uint64_t;

u64 pow_mod(u64 base, u64 exp, u64 m)
{
    u64 result = 1;
    base %= m;
    while (exp > 0) {
        if (exp & 1)
            result = result * base % m;
        base = base * base % m;
        exp >>= 1;
    }
    return result;
}

bool is_prime(u64 v)
{
    if (v < 2)
        return false;
    for (u64 f = 2; f * f <= v; ++f)
        if (v % f == 0)
            return false;
    return true;
}

// Legendre symbol for odd prime p: 1 residue, -1 non-residue, 0 for zero.
int legendre(u64 a, u64 p)
{
    a %= p;
    if (a == 0)
        return 0;
    return pow_mod(a, (p - 1) / 2, p) == 1 ? 1 : -1;
}

u64 curve_rhs(u64 x, u64 p)
{
    return (x * x % p * x + 7) % p;
}

} // namespace

int main(int argc, char** argv)
{
    u64 lo = 200, hi = 1200;
    if (argc == 3) {
        lo = std::strtoull(argv[1], nullptr, 10);
        hi = std::strtoull(argv[2], nullptr, 10);
    } else if (argc != 1) {
        std::fprintf(stderr, "usage: %s [lo hi]\n", argv[0]);
        return 2;
    }

    for (u64 p = lo; p <= hi; ++p) {
        if (!is_prime(p) || p % 4 != 3 || p % 7 == 0)
            continue;
        if (legendre(7, p) != -1)
            continue;

        // point count: 1 (infinity) + per-x solutions of y^2 = x^3 + 7
        u64 n = 1;
        for (u64 x = 0; x < p; ++x) {
            int ls = legendre(curve_rhs(x, p), p);
            n += ls == 1 ? 2 : (ls == 0 ? 1 : 0);
        }
        if (n <= p || !is_prime(n))
            continue;

        for (u64 x = 0; x < p; ++x) {
            u64 rhs = curve_rhs(x, p);
            if (legendre(rhs, p) != 1)
                continue;
            u64 y = pow_mod(rhs, (p + 1) / 4, p);
            if (p - y < y)
                y = p - y;
            std::printf("p=%llu n=%llu G=(%llu,%llu) cofactor=1\n",
                        static_cast<unsigned long long>(p), static_cast<unsigned long long>(n),
                        static_cast<unsigned long long>(x), static_cast<unsigned long long>(y));
            break;
        }
    }
    return 0;
}
