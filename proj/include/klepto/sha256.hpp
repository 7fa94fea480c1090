#pragma once

#include <array>

#include "klepto/bytes.hpp"

namespace klepto {

using Digest = std::array<std::uint8_t, 32>;

Digest sha256(ByteView data);
Digest double_sha256(ByteView data);

std::string digest_hex(const Digest& d);
Digest digest_from_hex(std::string_view hex);

} // namespace klepto
