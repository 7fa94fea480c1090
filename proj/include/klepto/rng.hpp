#pragma once

#include <cstdint>
#include <random>
#include <span>

#include "klepto/bigint.hpp"
#include "klepto/sha256.hpp"

namespace klepto {

// Byte-level entropy source. Implementations need not be thread-safe; each
// worker owns its own source.
class EntropySource {
public:
    virtual ~EntropySource() = default;
    virtual void fill(std::span<std::uint8_t> out) = 0;
};

class SystemEntropy final : public EntropySource {
public:
    void fill(std::span<std::uint8_t> out) override;

private:
    std::random_device dev_;
};

// Deterministic SHA-256 counter stream for reproducible demos and tests:
// block_i = SHA256(seed || be64(i)). A seeded run has no secrecy whatsoever.
class Sha256CtrEntropy final : public EntropySource {
public:
    explicit Sha256CtrEntropy(ByteView seed);
    void fill(std::span<std::uint8_t> out) override;

    // Independent stream for a worker: seed' = SHA256(seed || "fork" || be32(index)).
    Sha256CtrEntropy fork(std::uint32_t index) const;

private:
    Bytes seed_;
    std::uint64_t block_ = 0;
    Digest buf_{};
    std::size_t pos_ = sizeof(Digest);
};

// Uniform scalar in [1, n-1] by truncate-and-reject: draw bit_length(n) bits,
// reject values outside the range. No modulo bias.
BigInt random_scalar(EntropySource& rng, const BigInt& n);

bool random_bit(EntropySource& rng);
Bytes random_bytes(EntropySource& rng, std::size_t len);

// Deterministic hash-to-scalar: candidate = SHA256(prefix || be32(counter))
// truncated to bit_length(n) bits; counter increments until the candidate
// lands in [1, n-1]. Requires bit_length(n) <= 256.
BigInt hash_to_scalar(ByteView prefix, const BigInt& n);

} // namespace klepto
