#pragma once

#include "pwref/generator.hpp"
#include "pwref/policy.hpp"
#include "pwref/rng.hpp"

#include <string_view>

namespace pwref {

bool satisfies_length(std::string_view password, const Policy& policy) noexcept;

/// Every character lies in some set of the policy and each set's occurrence
/// count is within [min_occurs, max_occurs].
bool satisfies_bounds(std::string_view password, const Policy& policy) noexcept;

inline bool satisfies(std::string_view password, const Policy& policy) noexcept {
    return satisfies_length(password, policy) && satisfies_bounds(password, policy);
}

/// Runs `rpg` once and checks its output against the policy.
bool correctness_experiment(const ValidatedPolicy& policy, const PasswordGenerator& rpg, ChoiceSource& cs);

}  // namespace pwref
