#include "pwref/generator.hpp"

#include <stdexcept>
#include <utility>

namespace pwref {

char generate_character(const CharSetSpec& set, std::size_t& budget, ChoiceSource& cs) {
    if (budget == 0) {
        throw std::logic_error("generate_character: set '" + set.name + "' has no budget left");
    }
    const auto index = cs.choose(set.size());
    --budget;
    return set.chars[index];
}

void permute(std::string& s, ChoiceSource& cs) {
    for (std::size_t i = s.size(); i-- > 1;) {
        const auto j = cs.choose(i + 1);
        std::swap(s[i], s[j]);
    }
}

Password generate(const ValidatedPolicy& policy, ChoiceSource& cs) {
    const auto& sets = policy.sets();

    GenerationState state;
    state.password.reserve(policy.length());
    state.budgets.reserve(sets.size());
    for (const auto& set : sets) {
        state.budgets.push_back(set.max_occurs);
    }

    for (std::size_t i = 0; i < sets.size(); ++i) {
        for (std::size_t k = 0; k < sets[i].min_occurs; ++k) {
            state.password.push_back(generate_character(sets[i], state.budgets[i], cs));
        }
    }

    std::string available;
    std::vector<std::size_t> owner;
    while (state.password.size() < policy.length()) {
        available.clear();
        owner.clear();
        for (std::size_t i = 0; i < sets.size(); ++i) {
            if (state.budgets[i] > 0) {
                available += sets[i].chars;
                owner.insert(owner.end(), sets[i].size(), i);
            }
        }
        // Satisfiability guarantees a nonempty union here.
        if (available.empty()) {
            throw std::logic_error("generate: no set has budget left before the password is complete");
        }
        const auto index = cs.choose(available.size());
        --state.budgets[owner[index]];
        state.password.push_back(available[index]);
    }

    permute(state.password, cs);
    return std::move(state.password);
}

}  // namespace pwref
