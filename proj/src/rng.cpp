#include "klepto/rng.hpp"

#include "klepto/error.hpp"

namespace klepto {

void SystemEntropy::fill(std::span<std::uint8_t> out)
{
    std::size_t i = 0;
    while (i < out.size()) {
        unsigned int word = dev_();
        for (int shift = 0; shift < 32 && i < out.size(); shift += 8)
            out[i++] = static_cast<std::uint8_t>(word >> shift);
    }
}

Sha256CtrEntropy::Sha256CtrEntropy(ByteView seed) : seed_(seed.begin(), seed.end()) {}

void Sha256CtrEntropy::fill(std::span<std::uint8_t> out)
{
    for (std::uint8_t& b : out) {
        if (pos_ == buf_.size()) {
            Bytes block = seed_;
            append_be64(block, block_++);
            buf_ = sha256(block);
            pos_ = 0;
        }
        b = buf_[pos_++];
    }
}

Sha256CtrEntropy Sha256CtrEntropy::fork(std::uint32_t index) const
{
    Bytes material = seed_;
    append_bytes(material, ascii_bytes("fork"));
    append_be32(material, index);
    Digest derived = sha256(material);
    return Sha256CtrEntropy(ByteView(derived.data(), derived.size()));
}

namespace {

// Truncate a big-endian byte block to exactly `bits` leading bits.
BigInt truncate_to_bits(ByteView block, std::size_t bits)
{
    std::size_t nbytes = (bits + 7) / 8;
    BigInt v = from_bytes_be(block.first(nbytes));
    std::size_t excess = 8 * nbytes - bits;
    if (excess > 0)
        v >>= excess;
    return v;
}

} // namespace

BigInt random_scalar(EntropySource& rng, const BigInt& n)
{
    if (n < 3)
        throw ValidationError("modulus too small to sample a nonzero scalar");
    std::size_t bits = bit_length(n);
    Bytes draw((bits + 7) / 8);
    for (;;) {
        rng.fill(draw);
        BigInt candidate = truncate_to_bits(draw, bits);
        if (candidate >= 1 && candidate < n)
            return candidate;
    }
}

bool random_bit(EntropySource& rng)
{
    std::uint8_t b = 0;
    rng.fill(std::span<std::uint8_t>(&b, 1));
    return (b & 1) != 0;
}

Bytes random_bytes(EntropySource& rng, std::size_t len)
{
    Bytes out(len);
    rng.fill(out);
    return out;
}

BigInt hash_to_scalar(ByteView prefix, const BigInt& n)
{
    std::size_t bits = bit_length(n);
    if (bits > 256)
        throw ValidationError("hash_to_scalar supports moduli up to 256 bits");
    if (n < 3)
        throw ValidationError("modulus too small to sample a nonzero scalar");
    Bytes material(prefix.begin(), prefix.end());
    material.resize(prefix.size() + 4);
    for (std::uint32_t counter = 0;; ++counter) {
        material[prefix.size() + 0] = static_cast<std::uint8_t>(counter >> 24);
        material[prefix.size() + 1] = static_cast<std::uint8_t>(counter >> 16);
        material[prefix.size() + 2] = static_cast<std::uint8_t>(counter >> 8);
        material[prefix.size() + 3] = static_cast<std::uint8_t>(counter);
        Digest digest = sha256(material);
        BigInt candidate = truncate_to_bits(ByteView(digest.data(), digest.size()), bits);
        if (candidate >= 1 && candidate < n)
            return candidate;
    }
}

} // namespace klepto
