#include "klepto/kleptogram.hpp"

#include "klepto/error.hpp"

namespace klepto {

SetupParams make_default_setup(Point attacker_pub, Bytes prng_seed)
{
    return SetupParams{1, 1, 1, std::move(attacker_pub), std::move(prng_seed)};
}

namespace {

void require_setup(const SetupParams& setup, const CurveParams& params)
{
    if (mpz_even_p(setup.omega.get_mpz_t()))
        throw ValidationError("omega must be odd");
    if (setup.attacker_pub.infinity || !on_curve(setup.attacker_pub, params))
        throw ValidationError("attacker public key is invalid");
}

} // namespace

BigInt klepto_prng(const Point& z, ByteView seed, std::uint32_t retry, const CurveParams& params)
{
    if (z.infinity)
        throw ValidationError("degenerate kleptogram point");
    Bytes prefix(seed.begin(), seed.end());
    append_bytes(prefix, encode_point(z, params));
    append_be32(prefix, retry);
    return hash_to_scalar(prefix, params.n);
}

Round1Result klepto_round1(KleptoState& state, EntropySource& rng, const CurveParams& params)
{
    if (state.phase != KleptoPhase::round1_pending)
        throw StateError("klepto round 1 requested while round 2 is pending");
    require_setup(state.setup, params);
    BigInt c1 = random_scalar(rng, params.n);
    Point m1 = scalar_mul(c1, params.G, params);
    state.stored_c1 = c1;
    state.phase = KleptoPhase::round2_pending;
    return Round1Result{std::move(c1), std::move(m1)};
}

Round2Result klepto_round2(KleptoState& state, EntropySource& rng, const CurveParams& params)
{
    if (state.phase != KleptoPhase::round2_pending)
        throw StateError("klepto round 2 requested without a stored c1");
    require_setup(state.setup, params);
    const SetupParams& setup = state.setup;
    const BigInt& c1 = state.stored_c1;

    BigInt q_coeff = mod(-(setup.alpha * c1) - setup.beta, params.n);
    Point q_part = scalar_mul(q_coeff, setup.attacker_pub, params);

    bool t_first = random_bit(rng);
    KleptoCandidate candidate;
    bool found = false;
    for (bool t : {t_first, !t_first}) {
        BigInt g_coeff = mod(c1 - setup.omega * (t ? 1 : 0), params.n);
        Point z = point_add(scalar_mul(g_coeff, params.G, params), q_part, params);
        if (!z.infinity) {
            candidate.z = std::move(z);
            candidate.t = t;
            found = true;
            break;
        }
    }
    if (!found)
        throw Error("kleptogram point is degenerate for both t values");
    candidate.retry = 0;
    candidate.c = klepto_prng(candidate.z, setup.prng_seed, candidate.retry, params);

    Point m2 = scalar_mul(candidate.c, params.G, params);
    state.phase = KleptoPhase::round1_pending;
    state.stored_c1 = 0;
    return Round2Result{std::move(candidate), std::move(m2)};
}

void klepto_rederive(KleptoCandidate& candidate, ByteView seed, const CurveParams& params)
{
    candidate.retry += 1;
    candidate.c = klepto_prng(candidate.z, seed, candidate.retry, params);
}

std::optional<BigInt> klepto_recover(const Point& m1, const Point& m2, const BigInt& attacker_priv,
                                     const BigInt& alpha, const BigInt& beta, const BigInt& omega,
                                     ByteView seed, std::uint32_t max_retry,
                                     const CurveParams& params)
{
    Point r = point_add(scalar_mul(mod(alpha, params.n), m1, params),
                        scalar_mul(mod(beta, params.n), params.G, params), params);
    Point z1 = point_sub(m1, scalar_mul(mod(attacker_priv, params.n), r, params), params);
    Point z2 = point_sub(z1, scalar_mul(mod(omega, params.n), params.G, params), params);

    // Retry-major order: the generation side almost always used retry 0, so
    // the true candidate is met within the first two checks.
    for (std::uint32_t retry = 0; retry <= max_retry; ++retry) {
        for (const Point* z : {&z1, &z2}) {
            if (z->infinity)
                continue;
            BigInt c = klepto_prng(*z, seed, retry, params);
            if (scalar_mul(c, params.G, params) == m2)
                return c;
        }
    }
    return std::nullopt;
}

std::optional<BigInt> klepto_recover(const Point& m1, const Point& m2, const BigInt& attacker_priv,
                                     const SetupParams& setup, std::uint32_t max_retry,
                                     const CurveParams& params)
{
    return klepto_recover(m1, m2, attacker_priv, setup.alpha, setup.beta, setup.omega,
                          setup.prng_seed, max_retry, params);
}

SetupStrengthReport check_setup_strength(const SetupParams& setup, const BigInt& attacker_priv,
                                         const CurveParams& params)
{
    require_setup(setup, params);
    if (scalar_mul(mod(attacker_priv, params.n), params.G, params) != setup.attacker_pub)
        throw ValidationError("attacker private key does not match the setup public key");

    auto order_of_multiple = [&](const BigInt& coeff) {
        return point_order(scalar_mul(mod(coeff, params.n), params.G, params), params);
    };

    SetupStrengthReport report;
    report.order_g1 = order_of_multiple(-(attacker_priv * setup.beta) - setup.omega);
    report.order_g2 = order_of_multiple(-(attacker_priv * setup.beta));
    report.order_g3 = order_of_multiple(1 - attacker_priv * setup.alpha);

    if (report.order_g1 == 1)
        report.detail += "G1 is the identity (d*beta + omega = 0 mod n); ";
    if (report.order_g2 == 1)
        report.detail += "G2 is the identity (d*beta = 0 mod n); ";
    if (report.order_g3 == 1)
        report.detail += "G3 is the identity (d*alpha = 1 mod n); ";
    report.degenerate = !report.detail.empty();
    if (!report.degenerate)
        report.detail = "all derived generators have full order n";
    return report;
}

} // namespace klepto
