#include "klepto/sha256.hpp"

#include <openssl/evp.h>

#include "klepto/error.hpp"

namespace klepto {

Digest sha256(ByteView data)
{
    Digest out{};
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha256(), nullptr) != 1 ||
        len != out.size())
        throw Error("SHA-256 computation failed");
    return out;
}

Digest double_sha256(ByteView data)
{
    Digest first = sha256(data);
    return sha256(ByteView(first.data(), first.size()));
}

std::string digest_hex(const Digest& d)
{
    return hex_encode(ByteView(d.data(), d.size()));
}

Digest digest_from_hex(std::string_view hex)
{
    Bytes raw = hex_decode(hex);
    if (raw.size() != 32)
        throw ParseError("digest must be 32 bytes");
    Digest d{};
    std::copy(raw.begin(), raw.end(), d.begin());
    return d;
}

} // namespace klepto
