#pragma once

#include "pwref/bignum.hpp"
#include "pwref/generator.hpp"
#include "pwref/policy.hpp"
#include "pwref/rng.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace pwref {

inline constexpr std::uint64_t kEnumerationLimit = 10'000'000;

class DomainTooLarge : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Exact probability law over passwords. Zero-mass passwords are absent.
struct ExactDistribution {
    std::map<Password, Rational> entries;

    Rational probability(const Password& password) const;
    Rational total() const;
    std::size_t support_size() const noexcept { return entries.size(); }

    friend bool operator==(const ExactDistribution&, const ExactDistribution&) = default;
};

/// All satisfying passwords, sorted by code point.
struct SatisfyingSet {
    std::vector<Password> passwords;

    std::size_t count() const noexcept { return passwords.size(); }
};

/// Brute force over alphabet^length strings, filtered by the checker.
/// Throws DomainTooLarge when alphabet^length exceeds `limit`.
SatisfyingSet enumerate_satisfying(const ValidatedPolicy& policy, std::uint64_t limit = kEnumerationLimit);

/// Sum over occurrence vectors k (sum k = length, min <= k <= max) of
/// multinomial(length; k) * prod |set_i|^k_i.
BigInt count_satisfying(const ValidatedPolicy& policy);

/// Uniform sampler over the satisfying set by unranking in code-point
/// lexicographic order. Completion counts are memoized per occurrence
/// vector, so one instance should serve many samples of the same policy.
class IdealSampler {
public:
    explicit IdealSampler(ValidatedPolicy policy, std::uint64_t state_limit = kEnumerationLimit);

    const ValidatedPolicy& policy() const noexcept { return policy_; }
    const BigInt& count() const noexcept { return count_; }

    /// The rank-th satisfying password. Requires rank < count().
    Password unrank(const BigInt& rank) const;

    /// One choose(count()) draw followed by unrank. Counts beyond 64 bits are
    /// drawn as 32-bit limbs with rejection.
    Password sample(ChoiceSource& cs) const;

private:
    const BigInt& completions(std::vector<std::size_t>& occurs, std::size_t filled) const;

    ValidatedPolicy policy_;
    std::uint64_t state_limit_;
    mutable std::map<std::vector<std::size_t>, BigInt> memo_;
    BigInt count_;
};

Password ideal_sample(const ValidatedPolicy& policy, ChoiceSource& cs);

/// Procedure whose every random decision goes through the ChoiceSource.
using ChoiceProcedure = std::function<std::string(ChoiceSource&)>;

/// Called once per leaf with the output and the product of all fan-outs
/// on the path (the leaf's probability is 1 / fanout_product).
using LeafVisitor = std::function<void(const std::string& output, const BigInt& fanout_product)>;

/// Depth-first enumeration of every choice sequence `procedure` can
/// consume, each choose(n) explored over all n outcomes. The procedure must
/// be deterministic given its choices. Returns the number of leaves; throws
/// DomainTooLarge once more than `limit` leaves are reached.
std::uint64_t enumerate_branches(const ChoiceProcedure& procedure, const LeafVisitor& visit,
                                 std::uint64_t limit = kEnumerationLimit);

/// Output law of `rpg` on `policy` under ideal uniform choices.
ExactDistribution exact_distribution(const PasswordGenerator& rpg, const ValidatedPolicy& policy,
                                     std::uint64_t limit = kEnumerationLimit);

/// Output law of a bare choice procedure.
ExactDistribution exact_distribution(const ChoiceProcedure& procedure, std::uint64_t limit = kEnumerationLimit);

/// Exact law of the ideal sampler: one choose(count) node, each rank unranked.
ExactDistribution ideal_distribution(const ValidatedPolicy& policy, std::uint64_t limit = kEnumerationLimit);

}  // namespace pwref
