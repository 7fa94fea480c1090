#pragma once

#include <filesystem>
#include <string>

#include "klepto/distinguish.hpp"
#include "klepto/kleptogram.hpp"
#include "klepto/setup_signer.hpp"
#include "klepto/supervisor.hpp"

namespace klepto {

// All files are JSON (single object) or length-prefixed JSON lines, with
// every numeric field rendered as fixed-width lowercase hex. Serializing a
// parsed file reproduces it byte-exactly.

struct KeyFile {
    std::string curve;
    std::string role; // "victim" or "attacker"
    KeyPair keypair;
};

void save_keypair(const std::filesystem::path& path, const KeyFile& file);
KeyFile load_keypair(const std::filesystem::path& path);

// Setup files carry attacker constants, the attacker public key and the prng
// seed - never the attacker private key. The loader rejects files that
// contain one.
void save_setup(const std::filesystem::path& path, const SetupParams& setup,
                const std::string& curve);
std::pair<SetupParams, std::string> load_setup(const std::filesystem::path& path);

void save_klepto_state(const std::filesystem::path& path, const KleptoState& state,
                       std::uint64_t signature_counter, const std::string& curve);
struct KleptoStateFile {
    KleptoState state;
    std::uint64_t signature_counter = 0;
    std::string curve;
};
KleptoStateFile load_klepto_state(const std::filesystem::path& path, const SetupParams& setup);

// Signature log: one record per line,
//   {"index":..,"pubkey":"..","msg":"..","r":"..","s":".."}
std::string record_to_json_line(const SignatureRecord& rec, const CurveParams& params);
SignatureRecord record_from_json_line(const std::string& line, const CurveParams& params);

struct LogParseResult {
    std::vector<SignatureRecord> records;
    std::size_t malformed_lines = 0;
};

LogParseResult load_signature_log(const std::filesystem::path& path, const CurveParams& params);
void append_signature_log(const std::filesystem::path& path,
                          std::span<const SignatureRecord> records, const CurveParams& params);

// Protocol messages / transcripts: one framed message per line, a decimal
// byte-length prefix, a space, then a type-tagged JSON payload.
std::string message_to_json(const ProtocolMessage& msg, const CurveParams& params);
ProtocolMessage message_from_json(const std::string& payload, const CurveParams& params);

std::string transcript_entry_to_line(const TranscriptEntry& entry, const CurveParams& params);

void save_transcript(const std::filesystem::path& path, const Transcript& transcript,
                     const Point& pubkey, const CurveParams& params);
struct TranscriptFile {
    Transcript transcript;
    Point pubkey;
    std::string curve;
};
TranscriptFile load_transcript(const std::filesystem::path& path);

// Corpus files reuse the signature-log format plus a header line.
void save_corpus(const std::filesystem::path& path, const Corpus& corpus,
                 const CurveParams& params);
Corpus load_corpus(const std::filesystem::path& path, const CurveParams& params);

std::string stat_report_to_json_line(const StatReport& report);

} // namespace klepto
