#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace klepto {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

std::string hex_encode(ByteView data);

// Throws ParseError on odd length or non-hex characters.
Bytes hex_decode(std::string_view hex);

Bytes ascii_bytes(std::string_view s);

void append_bytes(Bytes& out, ByteView data);
void append_be32(Bytes& out, std::uint32_t v);
void append_be64(Bytes& out, std::uint64_t v);

} // namespace klepto
