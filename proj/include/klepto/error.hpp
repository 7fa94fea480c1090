#pragma once

#include <stdexcept>
#include <string>

namespace klepto {

// Base class for every error raised by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid domain input: off-curve point, zero scalar where forbidden, bad encoding.
struct ValidationError : Error {
    using Error::Error;
};

// sign() produced r = 0 or s = 0. Nonce selection belongs to the caller, so the
// retry is surfaced instead of looped internally.
struct RetryNonceError : Error {
    RetryNonceError() : Error("signature component is zero, a fresh nonce is required") {}
};

// Protocol state machine driven out of phase.
struct StateError : Error {
    using Error::Error;
};

// Supervisor protocol cancelled; the message names the failed check.
struct ProtocolCancelledError : Error {
    using Error::Error;
};

// Malformed file content or record.
struct ParseError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

} // namespace klepto
