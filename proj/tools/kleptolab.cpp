// kleptolab: ECDSA nonce-channel attack laboratory.
//
// Subcommands cover the whole pipeline: key generation, honest/malicious/
// deterministic signing, attacker-side log scanning, the supervisor
// co-signing protocol with offline transcript replay, and the statistical
// distinguishability bench.
//
// Exit codes: 0 success, 1 attack findings, 2 protocol cancelled,
// 3 verification failure, 4 I/O or configuration error.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>

#include "klepto/distinguish.hpp"
#include "klepto/error.hpp"
#include "klepto/formats.hpp"
#include "klepto/supervisor.hpp"

using namespace klepto;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFindings = 1;
constexpr int kExitProtocolCancel = 2;
constexpr int kExitVerifyFailure = 3;
constexpr int kExitConfig = 4;

std::unique_ptr<EntropySource> make_rng(const std::string& seed_hex)
{
    if (seed_hex.empty())
        return std::make_unique<SystemEntropy>();
    Bytes seed = hex_decode(seed_hex);
    return std::make_unique<Sha256CtrEntropy>(seed);
}

// One message per line, taken as raw bytes without the newline.
std::vector<Bytes> load_messages(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open messages file " + path);
    std::vector<Bytes> messages;
    std::string line;
    while (std::getline(in, line))
        messages.push_back(ascii_bytes(line));
    if (messages.empty())
        throw ValidationError("messages file is empty");
    return messages;
}

std::vector<Bytes> resolve_messages(const std::string& path, std::size_t count,
                                    EntropySource& rng)
{
    if (!path.empty())
        return load_messages(path);
    if (count == 0)
        throw ValidationError("provide --messages or a nonzero --count");
    std::vector<Bytes> messages;
    messages.reserve(count);
    for (std::size_t i = 0; i < count; ++i)
        messages.push_back(random_bytes(rng, 32));
    return messages;
}

KeyFile load_role_key(const std::string& path, const std::string& expected_role)
{
    KeyFile file = load_keypair(path);
    if (file.role != expected_role)
        throw ValidationError("key file " + path + " has role '" + file.role + "', expected '" +
                              expected_role + "' (victim-side commands never read attacker keys)");
    return file;
}

// --- keygen ---------------------------------------------------------------

struct KeygenArgs {
    std::string curve = "toy";
    std::string role = "victim";
    std::string out;
    std::string seed_hex;
};

int cmd_keygen(const KeygenArgs& args)
{
    const CurveParams& params = registry_get(args.curve);
    auto rng = make_rng(args.seed_hex);
    KeyPair kp = keygen(*rng, params);
    save_keypair(args.out, KeyFile{args.curve, args.role, kp});
    std::cout << "curve:   " << args.curve << "\n"
              << "role:    " << args.role << "\n"
              << "pubkey:  " << point_to_hex(kp.Q, params) << "\n"
              << "address: " << digest_hex(derive_address(kp.Q, params)) << "\n"
              << "written: " << args.out << "\n";
    return kExitOk;
}

// --- setup-gen ------------------------------------------------------------

struct SetupGenArgs {
    std::string attacker_key;
    std::string out;
    std::string alpha_hex = "01";
    std::string beta_hex = "01";
    std::string omega_hex = "01";
    std::string seed_hex;
};

int cmd_setup_gen(const SetupGenArgs& args)
{
    KeyFile attacker = load_role_key(args.attacker_key, "attacker");
    const CurveParams& params = registry_get(attacker.curve);
    auto rng = make_rng(args.seed_hex);

    SetupParams setup;
    setup.alpha = bigint_from_hex(args.alpha_hex);
    setup.beta = bigint_from_hex(args.beta_hex);
    setup.omega = bigint_from_hex(args.omega_hex);
    setup.attacker_pub = attacker.keypair.Q;
    setup.prng_seed = random_bytes(*rng, 32);

    SetupStrengthReport strength = check_setup_strength(setup, attacker.keypair.d, params);
    save_setup(args.out, setup, attacker.curve);
    std::cout << "order(G1): " << strength.order_g1.get_str() << "\n"
              << "order(G2): " << strength.order_g2.get_str() << "\n"
              << "order(G3): " << strength.order_g3.get_str() << "\n"
              << "strength:  " << strength.detail << "\n"
              << "written:   " << args.out << "\n";
    if (strength.degenerate) {
        std::cerr << "warning: degenerate constants, the covert channel is weakened\n";
        return kExitConfig;
    }
    return kExitOk;
}

// --- sign -----------------------------------------------------------------

struct SignArgs {
    std::string key;
    std::string mode = "honest";
    std::string messages;
    std::size_t count = 0;
    std::string out;
    std::string setup;
    std::string state;
    std::string seed_hex;
};

int cmd_sign(const SignArgs& args)
{
    KeyFile key = load_role_key(args.key, "victim");
    const CurveParams& params = registry_get(key.curve);
    auto rng = make_rng(args.seed_hex);
    std::vector<Bytes> messages = resolve_messages(args.messages, args.count, *rng);

    // continue the log's index sequence when appending
    std::uint64_t next_index = 0;
    if (std::filesystem::exists(args.out))
        next_index = load_signature_log(args.out, params).records.size();

    std::vector<SignatureRecord> records;
    records.reserve(messages.size());

    if (args.mode == "honest") {
        for (Bytes& msg : messages) {
            Signature sig = sign_with_fresh_nonce(msg, key.keypair.d, params, *rng);
            records.push_back(
                SignatureRecord{next_index++, std::move(msg), std::move(sig), key.keypair.Q});
        }
    } else if (args.mode == "deterministic") {
        for (Bytes& msg : messages) {
            BigInt k = derive_deterministic_nonce(key.keypair.d, msg, params);
            Signature sig = sign(msg, key.keypair.d, k, params);
            records.push_back(
                SignatureRecord{next_index++, std::move(msg), std::move(sig), key.keypair.Q});
        }
    } else if (args.mode == "malicious") {
        if (args.setup.empty() || args.state.empty())
            throw ValidationError("malicious mode requires --setup and --state");
        auto [setup, setup_curve] = load_setup(args.setup);
        if (setup_curve != key.curve)
            throw ValidationError("setup file curve does not match the key file");

        MaliciousSigner signer{key.keypair,
                               KleptoState{setup, KleptoPhase::round1_pending, 0}, 0};
        if (std::filesystem::exists(args.state)) {
            KleptoStateFile state_file = load_klepto_state(args.state, setup);
            if (state_file.curve != key.curve)
                throw ValidationError("state file curve does not match the key file");
            signer.klepto = state_file.state;
            signer.signature_counter = state_file.signature_counter;
        }
        for (Bytes& msg : messages) {
            Signature sig = malicious_sign(signer, msg, params, *rng);
            records.push_back(
                SignatureRecord{next_index++, std::move(msg), std::move(sig), key.keypair.Q});
        }
        // "store c1 in non-volatile memory": the phase survives the process
        save_klepto_state(args.state, signer.klepto, signer.signature_counter, key.curve);
    } else {
        throw ValidationError("unknown mode: " + args.mode);
    }

    append_signature_log(args.out, records, params);
    std::cout << "signed " << records.size() << " message(s) in " << args.mode << " mode -> "
              << args.out << "\n";
    return kExitOk;
}

// --- attack ---------------------------------------------------------------

struct AttackArgs {
    std::string log;
    std::string attacker_key;
    std::string setup;
    unsigned threads = 0;
};

int cmd_attack(const AttackArgs& args)
{
    KeyFile attacker = load_role_key(args.attacker_key, "attacker");
    auto [setup, setup_curve] = load_setup(args.setup);
    if (setup_curve != attacker.curve)
        throw ValidationError("setup file curve does not match the attacker key");
    const CurveParams& params = registry_get(attacker.curve);

    LogParseResult log = load_signature_log(args.log, params);
    if (log.malformed_lines > 0)
        std::cerr << "warning: " << log.malformed_lines << " malformed line(s) skipped\n";

    ScanResult result = scan_signature_log(log.records, attacker.keypair.d, setup, params,
                                           kDefaultMaxRetry, args.threads);
    if (result.skipped_records > 0)
        std::cerr << "warning: " << result.skipped_records
                  << " non-verifying record(s) skipped\n";

    for (const RecoveredKey& key : result.keys) {
        std::cout << "recovered pubkey=" << point_to_hex(key.pubkey, params)
                  << " d=" << to_hex(key.d, params.scalar_bytes()) << "\n";
    }
    std::cout << "records=" << log.records.size() << " recovered_keys=" << result.keys.size()
              << "\n";
    return result.keys.empty() ? kExitOk : kExitFindings;
}

// --- supervise ------------------------------------------------------------

struct SuperviseArgs {
    std::string mode = "interactive";
    std::string key;
    std::string messages;
    std::size_t count = 0;
    std::string transcript;
    std::string out;
    std::string setup;
    bool cheat = false;
    std::size_t list_len = 0;
    std::string seed_hex;
};

int cmd_supervise(const SuperviseArgs& args)
{
    KeyFile key = load_role_key(args.key, "victim");
    const CurveParams& params = registry_get(key.curve);
    auto rng = make_rng(args.seed_hex);
    std::vector<Bytes> messages = resolve_messages(args.messages, args.count, *rng);

    // the cheating signer runs the kleptogram; an ephemeral setup serves the
    // demo when none is provided
    std::optional<KleptoState> cheat_state;
    if (args.cheat) {
        SetupParams setup;
        if (!args.setup.empty()) {
            auto [loaded, setup_curve] = load_setup(args.setup);
            if (setup_curve != key.curve)
                throw ValidationError("setup file curve does not match the key file");
            setup = std::move(loaded);
        } else {
            KeyPair attacker = keygen(*rng, params);
            setup = make_default_setup(attacker.Q, random_bytes(*rng, 32));
        }
        cheat_state = KleptoState{std::move(setup), KleptoPhase::round1_pending, 0};
    }

    Transcript transcript;
    transcript.deterministic_time = !args.seed_hex.empty();
    std::vector<SignatureRecord> released;
    int exit_code = kExitOk;
    std::uint64_t index = 0;

    auto flush_outputs = [&] {
        if (!args.transcript.empty())
            save_transcript(args.transcript, transcript, key.keypair.Q, params);
        if (!args.out.empty() && !released.empty())
            append_signature_log(args.out, released, params);
    };

    try {
        if (args.mode == "interactive") {
            for (const Bytes& m : messages) {
                SignerSession signer{key.keypair, {}, {}, SignerPhase::idle};
                SupervisorSession supervisor{key.keypair.Q, {}, {}, SupervisorPhase::idle};

                CommitMsg commit = signer_commit(signer, *rng, params);
                transcript.record(Direction::signer_to_supervisor, commit);
                ChallengeMsg challenge = supervisor_challenge(supervisor, commit, m, *rng, params);
                transcript.record(Direction::supervisor_to_signer,
                                  SignRequestMsg{m, challenge.u});
                SignerFinish finish =
                    args.cheat ? signer_finish_cheating(signer, challenge.u, m, *cheat_state,
                                                        *rng, params)
                               : signer_finish(signer, challenge.u, m, params);
                transcript.record(Direction::signer_to_supervisor, finish.reveal);
                transcript.record(Direction::signer_to_supervisor, finish.sig);

                ValidationOutcome outcome = supervisor_validate(
                    supervisor, finish.reveal.t_point, finish.sig.sig, m, params);
                if (!outcome.accepted)
                    throw ProtocolCancelledError(std::string("protocol cancelled: ") +
                                                 reject_reason_name(outcome.reason));
                std::cout << "released " << record_to_json_line(
                                 SignatureRecord{index, m, finish.sig.sig, key.keypair.Q}, params)
                          << "\n";
                released.push_back(SignatureRecord{index++, m, finish.sig.sig, key.keypair.Q});
            }
        } else if (args.mode == "prearranged") {
            std::size_t list_len = args.list_len == 0 ? messages.size() : args.list_len;
            SignerSession signer{key.keypair, {}, {}, SignerPhase::idle};
            SupervisorSession supervisor{key.keypair.Q, {}, {}, SupervisorPhase::idle};
            PrearrangeMsg pre = prearrange(signer, list_len, *rng, params);
            supervisor_receive_prearrange(supervisor, pre);
            transcript.record(Direction::signer_to_supervisor, pre);

            for (const Bytes& m : messages) {
                SignatureRecord rec =
                    sign_prearranged(signer, supervisor, m, *rng, params, &transcript,
                                     cheat_state ? &*cheat_state : nullptr);
                rec.index = index++;
                std::cout << "released " << record_to_json_line(rec, params) << "\n";
                released.push_back(std::move(rec));
            }
        } else {
            throw ValidationError("unknown mode: " + args.mode);
        }
    } catch (const ProtocolCancelledError& e) {
        std::cerr << e.what() << "\n";
        exit_code = kExitProtocolCancel;
    }

    flush_outputs();
    std::cout << "released=" << released.size() << " of " << messages.size()
              << " transcript=" << (args.transcript.empty() ? "-" : args.transcript) << "\n";
    return exit_code;
}

// --- replay ---------------------------------------------------------------

struct ReplayArgs {
    std::string transcript;
};

int cmd_replay(const ReplayArgs& args)
{
    TranscriptFile file = load_transcript(args.transcript);
    const CurveParams& params = registry_get(file.curve);
    ReplayResult result = replay_transcript(file.transcript, file.pubkey, params);
    for (const ReplayCheck& check : result.checks) {
        std::cout << "session " << check.session << ": "
                  << (check.outcome.accepted ? "accepted"
                                             : reject_reason_name(check.outcome.reason))
                  << "\n";
    }
    std::cout << "sessions=" << result.checks.size()
              << " result=" << (result.all_accepted ? "all-accepted" : "verification-failed")
              << "\n";
    return result.all_accepted ? kExitOk : kExitVerifyFailure;
}

// --- bench ----------------------------------------------------------------

struct BenchArgs {
    std::string curve = "toy";
    std::size_t count = 10000;
    std::size_t pair_budget = 1000;
    std::string out;
    bool positive_control = false;
    std::string seed_hex;
    unsigned threads = 0;
};

int cmd_bench(const BenchArgs& args)
{
    const CurveParams& params = registry_get(args.curve);
    if (args.count < 100)
        throw ValidationError("--count must be at least 100 for the battery");
    auto rng = make_rng(args.seed_hex);

    KeyPair attacker = keygen(*rng, params);
    KeyPair victim = keygen(*rng, params);
    SetupParams setup = make_default_setup(attacker.Q, random_bytes(*rng, 32));

    std::ostringstream report;
    bool properties_hold = true;

    Corpus honest =
        generate_corpus(CorpusMode::honest, args.count, victim, {}, params, *rng, args.threads);
    Corpus malicious = generate_corpus(CorpusMode::malicious, args.count, victim, setup, params,
                                       *rng, args.threads);

    report << "third-party battery: honest vs malicious (" << args.count << " each, curve "
           << args.curve << ")\n";
    auto reports = third_party_tests(honest, malicious, params, 0.001, args.threads);
    for (const StatReport& r : reports) {
        report << "  " << (r.pass ? "pass" : "FAIL") << "  " << r.test_name
               << "  stat=" << r.statistic << "  p=" << r.p_value << "\n";
        properties_hold = properties_hold && r.pass;
    }

    DistinguisherReport mal = attacker_distinguisher(malicious, attacker.d, setup, params,
                                                     args.pair_budget, args.threads);
    DistinguisherReport hon = attacker_distinguisher(honest, attacker.d, setup, params,
                                                     args.pair_budget, args.threads);
    report << "attacker distinguisher:\n"
           << "  malicious corpus: verdict=" << (mal.verdict_malicious ? "malicious" : "clean")
           << " detection=" << mal.klepto_recovered << "/" << mal.klepto_pairs
           << " stray_hits=" << mal.nonklepto_recovered << "\n"
           << "  honest corpus:    verdict=" << (hon.verdict_malicious ? "malicious" : "clean")
           << " false_positives=" << hon.nonklepto_recovered << "/" << hon.nonklepto_pairs
           << "\n";
    properties_hold = properties_hold && mal.verdict_malicious &&
                      mal.klepto_recovered == mal.klepto_pairs;
    if (params.name == "secp256k1") {
        properties_hold =
            properties_hold && !hon.verdict_malicious && mal.nonklepto_recovered == 0;
    } else if (hon.verdict_malicious || mal.nonklepto_recovered > 0) {
        report << "  note: toy-curve stray hits are expected at rate ~2*(max_retry+1)/n;\n"
               << "        a hit is a correct discrete log, the group is just tiny\n";
    }

    if (args.positive_control) {
        Corpus biased = generate_corpus(CorpusMode::biased, args.count, victim, {}, params, *rng,
                                        args.threads);
        report << "positive control: honest vs constant-nonce corpus\n";
        auto control = third_party_tests(honest, biased, params, 0.001, args.threads);
        bool any_failed = false;
        for (const StatReport& r : control) {
            report << "  " << (r.pass ? "pass" : "FAIL(expected)") << "  " << r.test_name
                   << "  p=" << r.p_value << "\n";
            any_failed = any_failed || !r.pass;
        }
        report << "  battery power: " << (any_failed ? "confirmed" : "MISSING") << "\n";
        properties_hold = properties_hold && any_failed;
    }

    std::cout << report.str();
    if (!args.out.empty()) {
        std::ofstream out(args.out, std::ios::trunc);
        if (!out)
            throw IoError("cannot write " + args.out);
        out << report.str();
        for (const StatReport& r : reports)
            out << stat_report_to_json_line(r) << "\n";
    }
    return properties_hold ? kExitOk : kExitVerifyFailure;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"ECDSA kleptographic attack laboratory"};
    app.require_subcommand(1);

    KeygenArgs keygen_args;
    CLI::App* keygen_cmd = app.add_subcommand("keygen", "generate a keypair file");
    keygen_cmd->add_option("--curve", keygen_args.curve, "curve name (secp256k1 or toy)");
    keygen_cmd->add_option("--role", keygen_args.role, "victim or attacker")
        ->check(CLI::IsMember({"victim", "attacker"}));
    keygen_cmd->add_option("--out", keygen_args.out, "output keypair file")->required();
    keygen_cmd->add_option("--seed", keygen_args.seed_hex,
                           "hex seed for reproducible output (breaks all security)");

    SetupGenArgs setup_args;
    CLI::App* setup_cmd =
        app.add_subcommand("setup-gen", "generate kleptogram setup parameters");
    setup_cmd->add_option("--attacker-key", setup_args.attacker_key, "attacker keypair file")
        ->required();
    setup_cmd->add_option("--out", setup_args.out, "output setup file")->required();
    setup_cmd->add_option("--alpha", setup_args.alpha_hex, "alpha constant (hex)");
    setup_cmd->add_option("--beta", setup_args.beta_hex, "beta constant (hex)");
    setup_cmd->add_option("--omega", setup_args.omega_hex, "omega constant (hex, odd)");
    setup_cmd->add_option("--seed", setup_args.seed_hex, "hex seed for reproducible output");

    SignArgs sign_args;
    CLI::App* sign_cmd = app.add_subcommand("sign", "sign messages into a log");
    sign_cmd->add_option("--key", sign_args.key, "victim keypair file")->required();
    sign_cmd->add_option("--mode", sign_args.mode, "honest, malicious or deterministic")
        ->check(CLI::IsMember({"honest", "malicious", "deterministic"}));
    sign_cmd->add_option("--messages", sign_args.messages, "file with one message per line");
    sign_cmd->add_option("--count", sign_args.count, "number of random messages instead");
    sign_cmd->add_option("--out", sign_args.out, "signature log to append to")->required();
    sign_cmd->add_option("--setup", sign_args.setup, "setup file (malicious mode)");
    sign_cmd->add_option("--state", sign_args.state, "klepto state file (malicious mode)");
    sign_cmd->add_option("--seed", sign_args.seed_hex, "hex seed for reproducible output");

    AttackArgs attack_args;
    CLI::App* attack_cmd =
        app.add_subcommand("attack", "scan a signature log for leaked keys");
    attack_cmd->add_option("--log", attack_args.log, "signature log file")->required();
    attack_cmd->add_option("--attacker-key", attack_args.attacker_key, "attacker keypair file")
        ->required();
    attack_cmd->add_option("--setup", attack_args.setup, "setup file")->required();
    attack_cmd->add_option("--threads", attack_args.threads, "worker threads (0 = auto)");

    SuperviseArgs supervise_args;
    CLI::App* supervise_cmd =
        app.add_subcommand("supervise", "run the signer/supervisor protocol");
    supervise_cmd->add_option("--mode", supervise_args.mode, "interactive or prearranged")
        ->check(CLI::IsMember({"interactive", "prearranged"}));
    supervise_cmd->add_option("--key", supervise_args.key, "victim keypair file")->required();
    supervise_cmd->add_option("--messages", supervise_args.messages,
                              "file with one message per line");
    supervise_cmd->add_option("--count", supervise_args.count,
                              "number of random messages instead");
    supervise_cmd->add_option("--transcript", supervise_args.transcript,
                              "transcript output file");
    supervise_cmd->add_option("--out", supervise_args.out, "signature log for released records");
    supervise_cmd->add_flag("--cheat", supervise_args.cheat,
                            "signer substitutes kleptogram nonces (shows the rejection)");
    supervise_cmd->add_option("--setup", supervise_args.setup, "setup file for --cheat");
    supervise_cmd->add_option("--list-len", supervise_args.list_len,
                              "prearranged list length (default: message count)");
    supervise_cmd->add_option("--seed", supervise_args.seed_hex,
                              "hex seed for reproducible output");

    ReplayArgs replay_args;
    CLI::App* replay_cmd =
        app.add_subcommand("replay", "re-verify a supervisor transcript offline");
    replay_cmd->add_option("--transcript", replay_args.transcript, "transcript file")
        ->required();

    BenchArgs bench_args;
    CLI::App* bench_cmd =
        app.add_subcommand("bench", "statistical distinguishability bench");
    bench_cmd->add_option("--curve", bench_args.curve, "curve name");
    bench_cmd->add_option("--count", bench_args.count, "signatures per corpus");
    bench_cmd->add_option("--pair-budget", bench_args.pair_budget,
                          "pairs evaluated by the attacker distinguisher");
    bench_cmd->add_option("--out", bench_args.out, "report output file");
    bench_cmd->add_flag("--positive-control", bench_args.positive_control,
                        "also test a deliberately biased corpus");
    bench_cmd->add_option("--seed", bench_args.seed_hex, "hex seed for reproducible output");
    bench_cmd->add_option("--threads", bench_args.threads, "worker threads (0 = auto)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (keygen_cmd->parsed())
            return cmd_keygen(keygen_args);
        if (setup_cmd->parsed())
            return cmd_setup_gen(setup_args);
        if (sign_cmd->parsed())
            return cmd_sign(sign_args);
        if (attack_cmd->parsed())
            return cmd_attack(attack_args);
        if (supervise_cmd->parsed())
            return cmd_supervise(supervise_args);
        if (replay_cmd->parsed())
            return cmd_replay(replay_args);
        if (bench_cmd->parsed())
            return cmd_bench(bench_args);
    } catch (const RetryNonceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitVerifyFailure;
    } catch (const ProtocolCancelledError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitProtocolCancel;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitConfig;
}
