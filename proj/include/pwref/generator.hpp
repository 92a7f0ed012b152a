#pragma once

#include "pwref/policy.hpp"
#include "pwref/rng.hpp"

#include <functional>
#include <string>
#include <vector>

namespace pwref {

using Password = std::string;

/// Working state of one generate() call. budgets[i] starts at the policy's
/// max_occurs for set i and drops by one per character drawn from that set.
struct GenerationState {
    Password password;
    std::vector<std::size_t> budgets;
};

/// Draws one character uniformly from `set` and charges it to `budget`.
/// Throws std::logic_error if the budget is already zero.
char generate_character(const CharSetSpec& set, std::size_t& budget, ChoiceSource& cs);

/// Fisher-Yates, high index to low: for i = n-1 .. 1 swap s[i] with s[j],
/// j = choose(i + 1). Consumes exactly max(n - 1, 0) choices.
void permute(std::string& s, ChoiceSource& cs);

/// The reference generator: per-set minimums first, then fill from the union
/// of sets with remaining budget, then a uniform shuffle.
///
/// Uses exactly sum(min) + (length - sum(min)) + (length - 1) choices.
Password generate(const ValidatedPolicy& policy, ChoiceSource& cs);

/// Any procedure that turns a policy and a ChoiceSource into a password; the
/// checker, oracle and harness accept this so alternative generators (and
/// deliberately broken ones) can be audited the same way.
using PasswordGenerator = std::function<Password(const ValidatedPolicy&, ChoiceSource&)>;

}  // namespace pwref
