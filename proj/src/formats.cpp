#include "klepto/formats.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

#include "klepto/error.hpp"

namespace klepto {

using Json = nlohmann::ordered_json;

namespace {

std::string scalar_hex(const BigInt& v, const CurveParams& params)
{
    return to_hex(v, params.scalar_bytes());
}

BigInt scalar_from_hex_checked(const std::string& hex, const CurveParams& params,
                               const char* what)
{
    BigInt v = bigint_from_hex(hex);
    if (v >= params.n)
        throw ParseError(std::string(what) + " is not reduced mod n");
    return v;
}

Json read_json_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open " + path.string());
    Json j;
    try {
        in >> j;
    } catch (const Json::exception& e) {
        throw ParseError("invalid JSON in " + path.string() + ": " + e.what());
    }
    return j;
}

void write_text_file(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::trunc);
    if (!out)
        throw IoError("cannot write " + path.string());
    out << text;
    if (!out)
        throw IoError("write failed for " + path.string());
}

std::string require_string(const Json& j, const char* key)
{
    if (!j.contains(key) || !j[key].is_string())
        throw ParseError(std::string("missing or invalid field: ") + key);
    return j[key].get<std::string>();
}

void require_kind(const Json& j, const std::string& kind)
{
    if (require_string(j, "kind") != kind)
        throw ParseError("file is not of kind " + kind);
}

} // namespace

void save_keypair(const std::filesystem::path& path, const KeyFile& file)
{
    const CurveParams& params = registry_get(file.curve);
    if (file.role != "victim" && file.role != "attacker")
        throw ValidationError("key role must be victim or attacker");
    Json j;
    j["kind"] = "keypair";
    j["curve"] = file.curve;
    j["role"] = file.role;
    j["d"] = scalar_hex(file.keypair.d, params);
    j["Q"] = point_to_hex(file.keypair.Q, params);
    write_text_file(path, j.dump(2) + "\n");
}

KeyFile load_keypair(const std::filesystem::path& path)
{
    Json j = read_json_file(path);
    require_kind(j, "keypair");
    KeyFile file;
    file.curve = require_string(j, "curve");
    file.role = require_string(j, "role");
    if (file.role != "victim" && file.role != "attacker")
        throw ParseError("key role must be victim or attacker");
    const CurveParams& params = registry_get(file.curve);
    file.keypair.d = scalar_from_hex_checked(require_string(j, "d"), params, "private key");
    file.keypair.Q = point_from_hex(require_string(j, "Q"), params);
    if (scalar_mul(file.keypair.d, params.G, params) != file.keypair.Q)
        throw ParseError("keypair file is inconsistent: d*G != Q");
    return file;
}

void save_setup(const std::filesystem::path& path, const SetupParams& setup,
                const std::string& curve)
{
    const CurveParams& params = registry_get(curve);
    Json j;
    j["kind"] = "setup";
    j["curve"] = curve;
    j["alpha"] = scalar_hex(setup.alpha, params);
    j["beta"] = scalar_hex(setup.beta, params);
    j["omega"] = scalar_hex(setup.omega, params);
    j["attacker_pub"] = point_to_hex(setup.attacker_pub, params);
    j["prng_seed"] = hex_encode(setup.prng_seed);
    write_text_file(path, j.dump(2) + "\n");
}

std::pair<SetupParams, std::string> load_setup(const std::filesystem::path& path)
{
    Json j = read_json_file(path);
    require_kind(j, "setup");
    // the signer-side file must never carry attacker private material
    for (const char* forbidden : {"d", "attacker_priv", "attacker_private"})
        if (j.contains(forbidden))
            throw ValidationError("setup file contains attacker private material");
    std::string curve = require_string(j, "curve");
    const CurveParams& params = registry_get(curve);
    SetupParams setup;
    setup.alpha = scalar_from_hex_checked(require_string(j, "alpha"), params, "alpha");
    setup.beta = scalar_from_hex_checked(require_string(j, "beta"), params, "beta");
    setup.omega = scalar_from_hex_checked(require_string(j, "omega"), params, "omega");
    setup.attacker_pub = point_from_hex(require_string(j, "attacker_pub"), params);
    setup.prng_seed = hex_decode(require_string(j, "prng_seed"));
    if (mpz_even_p(setup.omega.get_mpz_t()))
        throw ParseError("omega must be odd");
    return {std::move(setup), std::move(curve)};
}

void save_klepto_state(const std::filesystem::path& path, const KleptoState& state,
                       std::uint64_t signature_counter, const std::string& curve)
{
    const CurveParams& params = registry_get(curve);
    Json j;
    j["kind"] = "klepto_state";
    j["curve"] = curve;
    j["phase"] =
        state.phase == KleptoPhase::round1_pending ? "round1_pending" : "round2_pending";
    j["signature_counter"] = signature_counter;
    if (state.phase == KleptoPhase::round2_pending)
        j["c1"] = scalar_hex(state.stored_c1, params);
    write_text_file(path, j.dump(2) + "\n");
}

KleptoStateFile load_klepto_state(const std::filesystem::path& path, const SetupParams& setup)
{
    Json j = read_json_file(path);
    require_kind(j, "klepto_state");
    KleptoStateFile file;
    file.curve = require_string(j, "curve");
    const CurveParams& params = registry_get(file.curve);
    file.state.setup = setup;
    std::string phase = require_string(j, "phase");
    if (phase == "round1_pending") {
        file.state.phase = KleptoPhase::round1_pending;
    } else if (phase == "round2_pending") {
        file.state.phase = KleptoPhase::round2_pending;
        file.state.stored_c1 = scalar_from_hex_checked(require_string(j, "c1"), params, "c1");
    } else {
        throw ParseError("unknown klepto phase: " + phase);
    }
    if (!j.contains("signature_counter") || !j["signature_counter"].is_number_unsigned())
        throw ParseError("missing or invalid field: signature_counter");
    file.signature_counter = j["signature_counter"].get<std::uint64_t>();
    bool even = file.signature_counter % 2 == 0;
    if (even != (file.state.phase == KleptoPhase::round1_pending))
        throw ParseError("klepto state counter does not match the stored phase");
    return file;
}

std::string record_to_json_line(const SignatureRecord& rec, const CurveParams& params)
{
    Json j;
    j["index"] = rec.index;
    j["pubkey"] = point_to_hex(rec.pubkey, params);
    j["msg"] = hex_encode(rec.msg);
    j["r"] = scalar_hex(rec.sig.r, params);
    j["s"] = scalar_hex(rec.sig.s, params);
    return j.dump();
}

SignatureRecord record_from_json_line(const std::string& line, const CurveParams& params)
{
    Json j;
    try {
        j = Json::parse(line);
    } catch (const Json::exception& e) {
        throw ParseError(std::string("invalid record line: ") + e.what());
    }
    SignatureRecord rec;
    if (!j.contains("index") || !j["index"].is_number_unsigned())
        throw ParseError("missing or invalid field: index");
    rec.index = j["index"].get<std::uint64_t>();
    rec.pubkey = point_from_hex(require_string(j, "pubkey"), params);
    rec.msg = hex_decode(require_string(j, "msg"));
    rec.sig.r = scalar_from_hex_checked(require_string(j, "r"), params, "r");
    rec.sig.s = scalar_from_hex_checked(require_string(j, "s"), params, "s");
    return rec;
}

LogParseResult load_signature_log(const std::filesystem::path& path, const CurveParams& params)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open " + path.string());
    LogParseResult result;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        try {
            result.records.push_back(record_from_json_line(line, params));
        } catch (const Error&) {
            result.malformed_lines += 1;
        }
    }
    return result;
}

void append_signature_log(const std::filesystem::path& path,
                          std::span<const SignatureRecord> records, const CurveParams& params)
{
    std::ofstream out(path, std::ios::app);
    if (!out)
        throw IoError("cannot write " + path.string());
    for (const SignatureRecord& rec : records)
        out << record_to_json_line(rec, params) << "\n";
    if (!out)
        throw IoError("write failed for " + path.string());
}

namespace {

std::string direction_name(Direction dir)
{
    return dir == Direction::signer_to_supervisor ? "signer->supervisor" : "supervisor->signer";
}

Direction direction_from_name(const std::string& name)
{
    if (name == "signer->supervisor")
        return Direction::signer_to_supervisor;
    if (name == "supervisor->signer")
        return Direction::supervisor_to_signer;
    throw ParseError("unknown message direction: " + name);
}

} // namespace

std::string message_to_json(const ProtocolMessage& msg, const CurveParams& params)
{
    Json j;
    if (const auto* commit = std::get_if<CommitMsg>(&msg)) {
        j["type"] = "commit";
        j["h_T"] = digest_hex(commit->h_t);
    } else if (const auto* challenge = std::get_if<ChallengeMsg>(&msg)) {
        j["type"] = "challenge";
        j["u"] = scalar_hex(challenge->u, params);
    } else if (const auto* reveal = std::get_if<RevealMsg>(&msg)) {
        j["type"] = "reveal";
        j["T"] = point_to_hex(reveal->t_point, params);
    } else if (const auto* sig = std::get_if<SigMsg>(&msg)) {
        j["type"] = "sig";
        j["sig"] = signature_to_hex(sig->sig, params);
    } else if (const auto* pre = std::get_if<PrearrangeMsg>(&msg)) {
        j["type"] = "prearrange";
        Json hashes = Json::array();
        for (const Digest& h : pre->hashes)
            hashes.push_back(digest_hex(h));
        j["hashes"] = std::move(hashes);
    } else if (const auto* req = std::get_if<SignRequestMsg>(&msg)) {
        j["type"] = "sign_request";
        j["m"] = hex_encode(req->m);
        j["u"] = scalar_hex(req->u, params);
    } else if (const auto* swr = std::get_if<SigWithRevealMsg>(&msg)) {
        j["type"] = "sig_with_reveal";
        j["sig"] = signature_to_hex(swr->sig, params);
        j["T"] = point_to_hex(swr->t_point, params);
    } else {
        throw Error("unhandled message type");
    }
    return j.dump();
}

ProtocolMessage message_from_json(const std::string& payload, const CurveParams& params)
{
    Json j;
    try {
        j = Json::parse(payload);
    } catch (const Json::exception& e) {
        throw ParseError(std::string("invalid message payload: ") + e.what());
    }
    std::string type = require_string(j, "type");
    if (type == "commit")
        return CommitMsg{digest_from_hex(require_string(j, "h_T"))};
    if (type == "challenge")
        return ChallengeMsg{scalar_from_hex_checked(require_string(j, "u"), params, "u")};
    if (type == "reveal")
        return RevealMsg{point_from_hex(require_string(j, "T"), params)};
    if (type == "sig")
        return SigMsg{signature_from_hex(require_string(j, "sig"), params)};
    if (type == "prearrange") {
        if (!j.contains("hashes") || !j["hashes"].is_array())
            throw ParseError("missing or invalid field: hashes");
        PrearrangeMsg msg;
        for (const auto& h : j["hashes"])
            msg.hashes.push_back(digest_from_hex(h.get<std::string>()));
        return msg;
    }
    if (type == "sign_request")
        return SignRequestMsg{hex_decode(require_string(j, "m")),
                              scalar_from_hex_checked(require_string(j, "u"), params, "u")};
    if (type == "sig_with_reveal")
        return SigWithRevealMsg{signature_from_hex(require_string(j, "sig"), params),
                                point_from_hex(require_string(j, "T"), params)};
    throw ParseError("unknown message type: " + type);
}

namespace {

std::string frame_line(const std::string& payload)
{
    return std::to_string(payload.size()) + " " + payload;
}

std::string unframe_line(const std::string& line)
{
    std::size_t space = line.find(' ');
    if (space == std::string::npos)
        throw ParseError("framed line has no length prefix");
    std::size_t length = 0;
    try {
        length = std::stoul(line.substr(0, space));
    } catch (const std::exception&) {
        throw ParseError("framed line has an invalid length prefix");
    }
    std::string payload = line.substr(space + 1);
    if (payload.size() != length)
        throw ParseError("framed line length does not match its payload");
    return payload;
}

} // namespace

std::string transcript_entry_to_line(const TranscriptEntry& entry, const CurveParams& params)
{
    Json j;
    j["seq"] = entry.seq;
    j["dir"] = direction_name(entry.dir);
    j["ts"] = entry.timestamp_ms;
    j["msg"] = Json::parse(message_to_json(entry.msg, params));
    return frame_line(j.dump());
}

void save_transcript(const std::filesystem::path& path, const Transcript& transcript,
                     const Point& pubkey, const CurveParams& params)
{
    std::ostringstream out;
    Json header;
    header["type"] = "context";
    header["curve"] = params.name;
    header["pubkey"] = point_to_hex(pubkey, params);
    out << frame_line(header.dump()) << "\n";
    for (const TranscriptEntry& entry : transcript.entries)
        out << transcript_entry_to_line(entry, params) << "\n";
    write_text_file(path, out.str());
}

TranscriptFile load_transcript(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line))
        throw ParseError("transcript is empty");
    Json header;
    try {
        header = Json::parse(unframe_line(line));
    } catch (const Json::exception& e) {
        throw ParseError(std::string("invalid transcript header: ") + e.what());
    }
    if (require_string(header, "type") != "context")
        throw ParseError("transcript must start with a context line");
    TranscriptFile file;
    file.curve = require_string(header, "curve");
    const CurveParams& params = registry_get(file.curve);
    file.pubkey = point_from_hex(require_string(header, "pubkey"), params);

    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        Json j;
        try {
            j = Json::parse(unframe_line(line));
        } catch (const Json::exception& e) {
            throw ParseError(std::string("invalid transcript line: ") + e.what());
        }
        TranscriptEntry entry;
        if (!j.contains("seq") || !j["seq"].is_number_unsigned())
            throw ParseError("missing or invalid field: seq");
        entry.seq = j["seq"].get<std::uint64_t>();
        entry.dir = direction_from_name(require_string(j, "dir"));
        if (!j.contains("ts") || !j["ts"].is_number())
            throw ParseError("missing or invalid field: ts");
        entry.timestamp_ms = j["ts"].get<std::int64_t>();
        if (!j.contains("msg"))
            throw ParseError("missing field: msg");
        entry.msg = message_from_json(j["msg"].dump(), params);
        file.transcript.entries.push_back(std::move(entry));
    }
    return file;
}

void save_corpus(const std::filesystem::path& path, const Corpus& corpus,
                 const CurveParams& params)
{
    std::ostringstream out;
    Json header;
    header["kind"] = "corpus";
    header["label"] = corpus_mode_name(corpus.label);
    header["curve"] = corpus.curve;
    header["config_hash"] = corpus.config_hash;
    out << header.dump() << "\n";
    for (const SignatureRecord& rec : corpus.records)
        out << record_to_json_line(rec, params) << "\n";
    write_text_file(path, out.str());
}

Corpus load_corpus(const std::filesystem::path& path, const CurveParams& params)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line))
        throw ParseError("corpus file is empty");
    Json header;
    try {
        header = Json::parse(line);
    } catch (const Json::exception& e) {
        throw ParseError(std::string("invalid corpus header: ") + e.what());
    }
    require_kind(header, "corpus");
    Corpus corpus;
    std::string label = require_string(header, "label");
    if (label == "honest") corpus.label = CorpusMode::honest;
    else if (label == "malicious") corpus.label = CorpusMode::malicious;
    else if (label == "deterministic") corpus.label = CorpusMode::deterministic;
    else if (label == "biased") corpus.label = CorpusMode::biased;
    else throw ParseError("unknown corpus label: " + label);
    corpus.curve = require_string(header, "curve");
    corpus.config_hash = require_string(header, "config_hash");
    if (corpus.curve != params.name)
        throw ParseError("corpus curve does not match the requested curve");
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        corpus.records.push_back(record_from_json_line(line, params));
    }
    return corpus;
}

std::string stat_report_to_json_line(const StatReport& report)
{
    Json j;
    j["test"] = report.test_name;
    j["statistic"] = report.statistic;
    j["p_value"] = report.p_value;
    j["samples"] = report.sample_size;
    j["alpha"] = report.alpha;
    j["pass"] = report.pass;
    return j.dump();
}

} // namespace klepto
