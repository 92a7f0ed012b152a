#include "pwref/cli.hpp"

#include "pwref/checker.hpp"
#include "pwref/generator.hpp"
#include "pwref/harness.hpp"
#include "pwref/json_io.hpp"
#include "pwref/oracle.hpp"
#include "pwref/policy.hpp"
#include "pwref/rng.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <charconv>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace pwref::cli {

namespace {

struct PolicyOptions {
    std::string policy_path;
    std::optional<long long> length;
    std::vector<std::string> charsets;
    std::vector<std::string> mins;
    std::vector<std::string> maxes;

    bool has_inline() const { return length || !charsets.empty() || !mins.empty() || !maxes.empty(); }
};

struct RandomOptions {
    std::string seed;
    std::string rng = "chrome";
};

[[noreturn]] void malformed(const std::string& detail) {
    throw PolicyError(PolicyErrorKind::MalformedInput, detail);
}

std::uint64_t parse_u64(const std::string& text, const std::string& what) {
    std::uint64_t value = 0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (text.empty() || ec != std::errc{} || ptr != end) {
        malformed(what + " must be a decimal unsigned 64-bit integer, got '" + text + "'");
    }
    return value;
}

std::string read_file(const std::string& path) {
    std::ifstream file(path, std::ios::binary);
    if (!file) {
        malformed("cannot read policy file '" + path + "'");
    }
    std::ostringstream buf;
    buf << file.rdbuf();
    return buf.str();
}

CharSetSpec& find_set(Policy& policy, const std::string& name) {
    for (auto& set : policy.sets) {
        if (set.name == name || (set.name.starts_with("literal:") && set.chars == name)) {
            return set;
        }
    }
    throw PolicyError(PolicyErrorKind::UnknownSetName, "no character set named '" + name + "' in this policy");
}

void apply_bound(Policy& policy, const std::string& spec, bool is_min) {
    const auto eq = spec.rfind('=');
    if (eq == std::string::npos || eq == 0) {
        malformed(std::string(is_min ? "--min" : "--max") + " expects NAME=K, got '" + spec + "'");
    }
    auto& set = find_set(policy, spec.substr(0, eq));
    const auto value = parse_u64(spec.substr(eq + 1), std::string(is_min ? "--min" : "--max") + " count");
    (is_min ? set.min_occurs : set.max_occurs) = static_cast<std::size_t>(value);
}

ValidatedPolicy load_policy(const PolicyOptions& opts) {
    if (!opts.policy_path.empty()) {
        if (opts.has_inline()) {
            malformed("--policy cannot be combined with --length/--charset/--min/--max");
        }
        return parse_policy(read_file(opts.policy_path));
    }
    if (!opts.length) {
        malformed("either --policy or --length is required");
    }
    if (*opts.length < 0) {
        throw PolicyError(PolicyErrorKind::LengthOutOfRange, "length " + std::to_string(*opts.length) + " is negative");
    }

    Policy policy;
    policy.length = static_cast<std::size_t>(*opts.length);
    for (const auto& spec : opts.charsets) {
        if (is_default_charset_name(spec)) {
            policy.sets.push_back(default_charset(spec, policy.length));
            continue;
        }
        std::string chars = spec.starts_with("literal:") ? spec.substr(8) : spec;
        policy.sets.push_back(CharSetSpec{"literal:" + chars, chars, 0, policy.length});
    }
    for (const auto& spec : opts.mins) {
        apply_bound(policy, spec, true);
    }
    for (const auto& spec : opts.maxes) {
        apply_bound(policy, spec, false);
    }
    return validate(std::move(policy));
}

std::unique_ptr<ChoiceSource> make_source(const RandomOptions& opts) {
    const auto variant = parse_rng_variant(opts.rng);
    std::unique_ptr<ByteSource> bytes;
    if (opts.seed.empty()) {
        bytes = std::make_unique<SystemByteSource>();
    } else {
        bytes = std::make_unique<SeededByteSource>(parse_u64(opts.seed, "--seed"));
    }
    return make_choice_source(std::move(bytes), WordWidth{}, variant);
}

SamplingConfig sampling_config(const RandomOptions& opts, unsigned threads) {
    SamplingConfig config;
    if (!opts.seed.empty()) {
        config.seed = parse_u64(opts.seed, "--seed");
    }
    config.variant = parse_rng_variant(opts.rng);
    config.threads = threads;
    return config;
}

void add_policy_options(CLI::App& cmd, PolicyOptions& opts) {
    cmd.add_option("--policy", opts.policy_path, "Policy JSON file");
    cmd.add_option("--length", opts.length, "Password length (inline policy)");
    cmd.add_option("--charset", opts.charsets,
                   "lowercase|uppercase|digits|special|literal:<chars> (repeatable, inline policy)");
    cmd.add_option("--min", opts.mins, "NAME=K minimum occurrences (repeatable)");
    cmd.add_option("--max", opts.maxes, "NAME=K maximum occurrences (repeatable)");
}

void add_random_options(CLI::App& cmd, RandomOptions& opts) {
    cmd.add_option("--seed", opts.seed, "Deterministic seed (decimal u64); default is the OS CSPRNG");
    cmd.add_option("--rng", opts.rng, "Rejection sampler: chrome|keepass")->check(CLI::IsMember({"chrome", "keepass"}));
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
    CLI::App app{"Policy-driven random password generator with verification tools", "pwref"};
    app.require_subcommand(1);

    PolicyOptions policy_opts;
    RandomOptions random_opts;

    auto* generate_cmd = app.add_subcommand("generate", "Generate passwords");
    std::uint64_t count = 1;
    std::string output = "text";
    add_policy_options(*generate_cmd, policy_opts);
    add_random_options(*generate_cmd, random_opts);
    generate_cmd->add_option("-n,--count", count, "Number of passwords");
    generate_cmd->add_option("--output", output, "text|json")->check(CLI::IsMember({"text", "json"}));

    auto* check_cmd = app.add_subcommand("check", "Check a password read from stdin against a policy");
    add_policy_options(*check_cmd, policy_opts);

    auto* count_cmd = app.add_subcommand("count", "Count passwords satisfying a policy");
    add_policy_options(*count_cmd, policy_opts);

    auto* exact_cmd = app.add_subcommand("exact", "Exact output distribution of the generator");
    add_policy_options(*exact_cmd, policy_opts);

    auto* audit_cmd = app.add_subcommand("audit", "Real-vs-ideal distinguishing report");
    std::string mode = "exact";
    std::uint64_t samples = 10000;
    unsigned threads = 1;
    bool table = false;
    add_policy_options(*audit_cmd, policy_opts);
    add_random_options(*audit_cmd, random_opts);
    audit_cmd->add_option("--mode", mode, "exact|empirical")->check(CLI::IsMember({"exact", "empirical"}));
    audit_cmd->add_option("--samples", samples, "Samples per game (empirical mode)");
    audit_cmd->add_option("--threads", threads, "Sampling threads (empirical mode)");
    audit_cmd->add_flag("--table", table, "Include the per-password table");

    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kSuccess : kInputError;
    }

    try {
        const auto policy = load_policy(policy_opts);

        if (generate_cmd->parsed()) {
            auto cs = make_source(random_opts);
            std::vector<Password> passwords;
            passwords.reserve(count);
            for (std::uint64_t i = 0; i < count; ++i) {
                passwords.push_back(generate(policy, *cs));
            }
            if (output == "json") {
                out << nlohmann::json(passwords).dump() << '\n';
            } else {
                for (const auto& pw : passwords) {
                    out << pw << '\n';
                }
            }
            return kSuccess;
        }

        if (check_cmd->parsed()) {
            std::string line;
            if (!std::getline(in, line)) {
                malformed("expected a password on stdin");
            }
            if (!line.empty() && line.back() == '\r') {
                line.pop_back();
            }
            if (satisfies(line, policy.policy())) {
                return kSuccess;
            }
            err << "password does not satisfy the policy\n";
            return kUnsatisfied;
        }

        if (count_cmd->parsed()) {
            out << nlohmann::json{{"count", to_decimal(count_satisfying(policy))}}.dump() << '\n';
            return kSuccess;
        }

        if (exact_cmd->parsed()) {
            const auto dist = exact_distribution(generate, policy);
            auto entries = nlohmann::json::array();
            for (const auto& [pw, p] : dist.entries) {
                auto entry = rational_to_json(p);
                entry["pw"] = pw;
                entries.push_back(std::move(entry));
            }
            out << nlohmann::json{{"dist", std::move(entries)}}.dump() << '\n';
            return kSuccess;
        }

        // audit
        auto report = advantage_report(policy, parse_game_mode(mode), samples, sampling_config(random_opts, threads));
        if (!table) {
            report.per_password.reset();
        }
        out << report_to_json(report).dump() << '\n';
        return kSuccess;
    } catch (const PolicyError& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    } catch (const DomainTooLarge& e) {
        err << "error: DomainTooLarge: " << e.what() << '\n';
        return kDomainTooLarge;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    }
}

}  // namespace pwref::cli
