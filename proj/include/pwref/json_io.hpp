#pragma once

// JSON conversions shared by the policy, oracle and harness modules and the CLI.

#include "pwref/bignum.hpp"
#include "pwref/policy.hpp"

#include "json.hpp"

namespace pwref {

/// Structural decode only; call validate() on the result.
Policy policy_from_json(const nlohmann::json& doc);
nlohmann::json policy_to_json_value(const Policy& policy);

/// {"num": "<decimal>", "den": "<decimal>"} in lowest terms.
nlohmann::json rational_to_json(const Rational& value);
Rational rational_from_json(const nlohmann::json& doc);

}  // namespace pwref
