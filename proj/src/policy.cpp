#include "pwref/policy.hpp"

#include "pwref/json_io.hpp"

#include <algorithm>
#include <array>
#include <numeric>

namespace pwref {

namespace {

struct BuiltinSet {
    std::string_view name;
    std::string_view chars;
};

constexpr std::array<BuiltinSet, 4> kBuiltinSets{{
    {"lowercase", "abcdefghijklmnopqrstuvwxyz"},
    {"uppercase", "ABCDEFGHIJKLMNOPQRSTUVWXYZ"},
    {"digits", "0123456789"},
    {"special", "-_.:!"},
}};

bool is_allowed_char(char c) noexcept {
    return c >= 0x21 && c <= 0x7e;
}

[[noreturn]] void fail(PolicyErrorKind kind, const std::string& detail) {
    throw PolicyError(kind, detail);
}

std::string set_label(const CharSetSpec& set, std::size_t index) {
    return "set #" + std::to_string(index) + " (" + set.name + ")";
}

}  // namespace

std::string_view to_string(PolicyErrorKind kind) noexcept {
    switch (kind) {
        case PolicyErrorKind::LengthOutOfRange: return "LengthOutOfRange";
        case PolicyErrorKind::EmptySet: return "EmptySet";
        case PolicyErrorKind::DuplicateChars: return "DuplicateChars";
        case PolicyErrorKind::OverlappingSets: return "OverlappingSets";
        case PolicyErrorKind::MinExceedsMax: return "MinExceedsMax";
        case PolicyErrorKind::Unsatisfiable: return "Unsatisfiable";
        case PolicyErrorKind::UnknownSetName: return "UnknownSetName";
        case PolicyErrorKind::MalformedInput: return "MalformedInput";
    }
    return "Unknown";
}

PolicyError::PolicyError(PolicyErrorKind kind, const std::string& detail)
    : std::runtime_error(std::string(to_string(kind)) + ": " + detail),
      kind_(kind),
      detail_(detail) {}

bool is_default_charset_name(std::string_view name) noexcept {
    return std::any_of(kBuiltinSets.begin(), kBuiltinSets.end(),
                       [&](const BuiltinSet& b) { return b.name == name; });
}

CharSetSpec default_charset(std::string_view name, std::size_t max_cap) {
    for (const auto& builtin : kBuiltinSets) {
        if (builtin.name == name) {
            return CharSetSpec{std::string(builtin.name), std::string(builtin.chars), 0, max_cap};
        }
    }
    fail(PolicyErrorKind::UnknownSetName, "no built-in character set named '" + std::string(name) + "'");
}

ValidatedPolicy::ValidatedPolicy(Policy policy) : policy_(std::move(policy)), owner_(256, -1) {
    for (std::size_t i = 0; i < policy_.sets.size(); ++i) {
        for (char c : policy_.sets[i].chars) {
            owner_[static_cast<unsigned char>(c)] = static_cast<int>(i);
            alphabet_.push_back(c);
        }
    }
    std::sort(alphabet_.begin(), alphabet_.end());
}

std::optional<std::size_t> ValidatedPolicy::owner_of(char c) const noexcept {
    const int owner = owner_[static_cast<unsigned char>(c)];
    if (owner < 0) {
        return std::nullopt;
    }
    return static_cast<std::size_t>(owner);
}

ValidatedPolicy validate(Policy policy) {
    if (policy.length < kMinPasswordLength || policy.length > kMaxPasswordLength) {
        fail(PolicyErrorKind::LengthOutOfRange,
             "length " + std::to_string(policy.length) + " outside [" + std::to_string(kMinPasswordLength) + ", " +
                 std::to_string(kMaxPasswordLength) + "]");
    }
    if (policy.sets.empty()) {
        fail(PolicyErrorKind::MalformedInput, "policy lists no character sets");
    }

    for (std::size_t i = 0; i < policy.sets.size(); ++i) {
        auto& set = policy.sets[i];
        if (set.chars.empty()) {
            fail(PolicyErrorKind::EmptySet, set_label(set, i) + " has no characters");
        }
        std::array<bool, 256> seen{};
        for (char c : set.chars) {
            if (!is_allowed_char(c)) {
                fail(PolicyErrorKind::MalformedInput,
                     set_label(set, i) + " contains a character outside printable non-space ASCII");
            }
            auto& slot = seen[static_cast<unsigned char>(c)];
            if (slot) {
                fail(PolicyErrorKind::DuplicateChars,
                     set_label(set, i) + " repeats character '" + std::string(1, c) + "'");
            }
            slot = true;
        }
        if (set.min_occurs > set.max_occurs) {
            fail(PolicyErrorKind::MinExceedsMax, set_label(set, i) + " has min " + std::to_string(set.min_occurs) +
                                                     " > max " + std::to_string(set.max_occurs));
        }
        set.max_occurs = std::min(set.max_occurs, policy.length);
    }

    std::array<int, 256> owner;
    owner.fill(-1);
    for (std::size_t i = 0; i < policy.sets.size(); ++i) {
        for (char c : policy.sets[i].chars) {
            auto& slot = owner[static_cast<unsigned char>(c)];
            if (slot >= 0) {
                fail(PolicyErrorKind::OverlappingSets, "character '" + std::string(1, c) + "' is in both " +
                                                           set_label(policy.sets[slot], slot) + " and " +
                                                           set_label(policy.sets[i], i));
            }
            slot = static_cast<int>(i);
        }
    }

    const auto min_total = std::accumulate(policy.sets.begin(), policy.sets.end(), std::size_t{0},
                                           [](std::size_t acc, const CharSetSpec& s) { return acc + s.min_occurs; });
    const auto max_total = std::accumulate(policy.sets.begin(), policy.sets.end(), std::size_t{0},
                                           [](std::size_t acc, const CharSetSpec& s) { return acc + s.max_occurs; });
    if (min_total > policy.length) {
        fail(PolicyErrorKind::Unsatisfiable, "minimum occurrences sum to " + std::to_string(min_total) +
                                                 " > length " + std::to_string(policy.length));
    }
    if (max_total < policy.length) {
        fail(PolicyErrorKind::Unsatisfiable, "maximum occurrences sum to " + std::to_string(max_total) +
                                                 " < length " + std::to_string(policy.length));
    }

    return ValidatedPolicy(std::move(policy));
}

namespace {

std::size_t read_count(const nlohmann::json& obj, const char* key, std::size_t fallback) {
    const auto it = obj.find(key);
    if (it == obj.end()) {
        return fallback;
    }
    if (!it->is_number_integer()) {
        fail(PolicyErrorKind::MalformedInput, std::string("\"") + key + "\" must be an integer");
    }
    const auto value = it->get<long long>();
    if (value < 0) {
        fail(PolicyErrorKind::MalformedInput, std::string("\"") + key + "\" must be nonnegative");
    }
    return static_cast<std::size_t>(value);
}

}  // namespace

Policy policy_from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) {
        fail(PolicyErrorKind::MalformedInput, "policy must be a JSON object");
    }
    for (const auto& [key, _] : doc.items()) {
        if (key != "length" && key != "sets") {
            fail(PolicyErrorKind::MalformedInput, "unknown key \"" + key + "\"");
        }
    }
    if (!doc.contains("length")) {
        fail(PolicyErrorKind::MalformedInput, "missing \"length\"");
    }
    if (!doc.contains("sets") || !doc["sets"].is_array()) {
        fail(PolicyErrorKind::MalformedInput, "missing \"sets\" array");
    }

    Policy policy;
    policy.length = read_count(doc, "length", 0);

    for (const auto& entry : doc["sets"]) {
        if (!entry.is_object()) {
            fail(PolicyErrorKind::MalformedInput, "each set must be a JSON object");
        }
        for (const auto& [key, _] : entry.items()) {
            if (key != "name" && key != "chars" && key != "min" && key != "max") {
                fail(PolicyErrorKind::MalformedInput, "unknown set key \"" + key + "\"");
            }
        }
        const bool has_name = entry.contains("name");
        const bool has_chars = entry.contains("chars");
        if (has_name == has_chars) {
            fail(PolicyErrorKind::MalformedInput, "a set needs exactly one of \"name\" or \"chars\"");
        }

        CharSetSpec set;
        if (has_name) {
            if (!entry["name"].is_string()) {
                fail(PolicyErrorKind::MalformedInput, "\"name\" must be a string");
            }
            set = default_charset(entry["name"].get<std::string>(), policy.length);
        } else {
            if (!entry["chars"].is_string()) {
                fail(PolicyErrorKind::MalformedInput, "\"chars\" must be a string");
            }
            set.chars = entry["chars"].get<std::string>();
            set.name = "literal:" + set.chars;
        }
        set.min_occurs = read_count(entry, "min", 0);
        set.max_occurs = read_count(entry, "max", policy.length);
        policy.sets.push_back(std::move(set));
    }
    return policy;
}

nlohmann::json policy_to_json_value(const Policy& policy) {
    nlohmann::json sets = nlohmann::json::array();
    for (const auto& set : policy.sets) {
        nlohmann::json entry;
        if (is_default_charset_name(set.name) && default_charset(set.name, 0).chars == set.chars) {
            entry["name"] = set.name;
        } else {
            entry["chars"] = set.chars;
        }
        entry["min"] = set.min_occurs;
        entry["max"] = set.max_occurs;
        sets.push_back(std::move(entry));
    }
    return nlohmann::json{{"length", policy.length}, {"sets", std::move(sets)}};
}

ValidatedPolicy parse_policy(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        fail(PolicyErrorKind::MalformedInput, e.what());
    }
    return validate(policy_from_json(doc));
}

std::string policy_to_json(const Policy& policy) {
    return policy_to_json_value(policy).dump();
}

}  // namespace pwref
