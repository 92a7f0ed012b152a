#include "pwref/checker.hpp"

#include <vector>

namespace pwref {

bool satisfies_length(std::string_view password, const Policy& policy) noexcept {
    return password.size() == policy.length;
}

bool satisfies_bounds(std::string_view password, const Policy& policy) noexcept {
    std::vector<std::size_t> counts(policy.sets.size(), 0);
    for (char c : password) {
        bool found = false;
        for (std::size_t i = 0; i < policy.sets.size(); ++i) {
            if (policy.sets[i].contains(c)) {
                ++counts[i];
                found = true;
                break;
            }
        }
        if (!found) {
            return false;
        }
    }
    for (std::size_t i = 0; i < policy.sets.size(); ++i) {
        if (counts[i] < policy.sets[i].min_occurs || counts[i] > policy.sets[i].max_occurs) {
            return false;
        }
    }
    return true;
}

bool correctness_experiment(const ValidatedPolicy& policy, const PasswordGenerator& rpg, ChoiceSource& cs) {
    const auto password = rpg(policy, cs);
    const bool length_ok = satisfies_length(password, policy.policy());
    const bool bounds_ok = satisfies_bounds(password, policy.policy());
    return length_ok && bounds_ok;
}

}  // namespace pwref
