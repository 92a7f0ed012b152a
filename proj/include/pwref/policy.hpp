#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pwref {

inline constexpr std::size_t kMinPasswordLength = 1;
inline constexpr std::size_t kMaxPasswordLength = 200;

enum class PolicyErrorKind {
    LengthOutOfRange,
    EmptySet,
    DuplicateChars,
    OverlappingSets,
    MinExceedsMax,
    Unsatisfiable,
    UnknownSetName,
    MalformedInput,
};

std::string_view to_string(PolicyErrorKind kind) noexcept;

class PolicyError : public std::runtime_error {
public:
    PolicyError(PolicyErrorKind kind, const std::string& detail);

    PolicyErrorKind kind() const noexcept { return kind_; }
    const std::string& detail() const noexcept { return detail_; }

private:
    PolicyErrorKind kind_;
    std::string detail_;
};

/// A named character class with occurrence bounds. Characters are single
/// printable, non-whitespace ASCII code units.
struct CharSetSpec {
    std::string name;
    std::string chars;
    std::size_t min_occurs = 0;
    std::size_t max_occurs = 0;

    std::size_t size() const noexcept { return chars.size(); }
    bool contains(char c) const noexcept { return chars.find(c) != std::string::npos; }

    friend bool operator==(const CharSetSpec&, const CharSetSpec&) = default;
};

struct Policy {
    std::size_t length = 0;
    std::vector<CharSetSpec> sets;

    friend bool operator==(const Policy&, const Policy&) = default;
};

/// A policy that passed validate(). Only validate() can produce one, so
/// holding a ValidatedPolicy means every invariant holds: length in range,
/// sets nonempty, duplicate-free and pairwise disjoint, min <= max <= length,
/// and sum(min) <= length <= sum(max).
class ValidatedPolicy {
public:
    const Policy& policy() const noexcept { return policy_; }
    std::size_t length() const noexcept { return policy_.length; }
    const std::vector<CharSetSpec>& sets() const noexcept { return policy_.sets; }

    /// Index of the set owning `c`, if any. Unique by disjointness.
    std::optional<std::size_t> owner_of(char c) const noexcept;

    /// Union of all set characters sorted by code point.
    const std::string& sorted_alphabet() const noexcept { return alphabet_; }

    friend bool operator==(const ValidatedPolicy& a, const ValidatedPolicy& b) {
        return a.policy_ == b.policy_;
    }

private:
    friend ValidatedPolicy validate(Policy policy);
    explicit ValidatedPolicy(Policy policy);

    Policy policy_;
    std::string alphabet_;
    std::vector<int> owner_;  // indexed by unsigned char, -1 = not in policy
};

/// Built-in sets: "lowercase", "uppercase", "digits", "special" (-_.:!).
/// `max_cap` becomes max_occurs; min_occurs is 0.
CharSetSpec default_charset(std::string_view name, std::size_t max_cap);

bool is_default_charset_name(std::string_view name) noexcept;

/// Checks every invariant and clamps each max_occurs to the policy length.
/// The first violation wins, in this order: length, per-set checks in list
/// order, disjointness, satisfiability.
ValidatedPolicy validate(Policy policy);

/// Parses the JSON policy format, then validates.
///
///   {"length": 16, "sets": [{"name": "lowercase", "min": 1},
///                           {"chars": "abc", "max": 2}]}
///
/// "min" defaults to 0 and "max" to the length. Unknown keys are rejected.
ValidatedPolicy parse_policy(std::string_view text);

/// Inverse of parse_policy for validated policies. Built-in sets whose
/// characters are unchanged serialize by name, everything else by chars.
std::string policy_to_json(const Policy& policy);

}  // namespace pwref
