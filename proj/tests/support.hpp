#pragma once

// Shared test fixtures: a deterministic entropy source and an independent
// toy-curve oracle written against plain 64-bit arithmetic, so the library's
// group law is checked against a second implementation rather than itself.

#include <cstdint>
#include <vector>

#include "klepto/curve.hpp"
#include "klepto/rng.hpp"

namespace testsupport {

inline klepto::Sha256CtrEntropy test_rng(std::string_view label)
{
    return klepto::Sha256CtrEntropy(klepto::ascii_bytes(label));
}

namespace toyoracle {

using u64 = std::uint64_t;

inline constexpr u64 kP = 823;
inline constexpr u64 kN = 829;

struct Pt {
    bool inf = true;
    u64 x = 0;
    u64 y = 0;

    bool operator==(const Pt&) const = default;
};

inline u64 pow_mod(u64 base, u64 exp, u64 m)
{
    u64 r = 1;
    base %= m;
    while (exp > 0) {
        if (exp & 1)
            r = r * base % m;
        base = base * base % m;
        exp >>= 1;
    }
    return r;
}

inline u64 inv_mod(u64 a, u64 m)
{
    return pow_mod(a % m, m - 2, m);
}

inline Pt add(const Pt& a, const Pt& b)
{
    if (a.inf) return b;
    if (b.inf) return a;
    if (a.x == b.x && (a.y + b.y) % kP == 0)
        return Pt{};
    u64 slope;
    if (a.x == b.x && a.y == b.y)
        slope = 3 * a.x % kP * a.x % kP * inv_mod(2 * a.y % kP, kP) % kP;
    else
        slope = (b.y + kP - a.y) % kP * inv_mod((b.x + kP - a.x) % kP, kP) % kP;
    u64 x3 = (slope * slope % kP + 2 * kP - a.x - b.x) % kP;
    u64 y3 = (slope * ((a.x + kP - x3) % kP) % kP + kP - a.y) % kP;
    return Pt{false, x3, y3};
}

inline Pt generator()
{
    return Pt{false, 1, 255};
}

inline Pt mul(u64 k, Pt base)
{
    Pt acc{};
    while (k > 0) {
        if (k & 1)
            acc = add(acc, base);
        base = add(base, base);
        k >>= 1;
    }
    return acc;
}

// table[k] = k*G for k in [0, n), built by repeated addition only
inline const std::vector<Pt>& multiples_of_g()
{
    static const std::vector<Pt> table = [] {
        std::vector<Pt> t;
        t.reserve(kN);
        Pt acc{};
        for (u64 k = 0; k < kN; ++k) {
            t.push_back(acc);
            acc = add(acc, generator());
        }
        return t;
    }();
    return table;
}

inline klepto::Point to_point(const Pt& pt)
{
    if (pt.inf)
        return klepto::Point::make_infinity();
    return klepto::Point::affine(klepto::BigInt(static_cast<unsigned long>(pt.x)),
                                 klepto::BigInt(static_cast<unsigned long>(pt.y)));
}

inline Pt from_point(const klepto::Point& p)
{
    if (p.infinity)
        return Pt{};
    return Pt{false, mpz_get_ui(p.x.get_mpz_t()), mpz_get_ui(p.y.get_mpz_t())};
}

} // namespace toyoracle

} // namespace testsupport
