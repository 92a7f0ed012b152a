#include "pwref/oracle.hpp"

#include "pwref/checker.hpp"

#include <algorithm>

namespace pwref {

Rational ExactDistribution::probability(const Password& password) const {
    const auto it = entries.find(password);
    return it == entries.end() ? Rational(0) : it->second;
}

Rational ExactDistribution::total() const {
    Rational sum = 0;
    for (const auto& [_, p] : entries) {
        sum += p;
    }
    return sum;
}

SatisfyingSet enumerate_satisfying(const ValidatedPolicy& policy, std::uint64_t limit) {
    const auto& alphabet = policy.sorted_alphabet();
    const auto length = policy.length();

    BigInt domain = boost::multiprecision::pow(BigInt(alphabet.size()), static_cast<unsigned>(length));
    if (domain > limit) {
        throw DomainTooLarge("enumerate_satisfying: " + to_decimal(domain) + " candidate strings exceed the limit of " +
                             std::to_string(limit));
    }

    SatisfyingSet result;
    std::vector<std::size_t> digits(length, 0);
    std::string candidate(length, alphabet.front());
    while (true) {
        if (satisfies(candidate, policy.policy())) {
            result.passwords.push_back(candidate);
        }
        // Odometer, rightmost digit fastest, keeps the output sorted.
        std::size_t pos = length;
        while (pos > 0) {
            --pos;
            if (++digits[pos] < alphabet.size()) {
                candidate[pos] = alphabet[digits[pos]];
                break;
            }
            digits[pos] = 0;
            candidate[pos] = alphabet.front();
            if (pos == 0) {
                return result;
            }
        }
    }
}

BigInt count_satisfying(const ValidatedPolicy& policy) {
    const auto length = policy.length();

    std::vector<std::vector<BigInt>> binom(length + 1);
    for (std::size_t n = 0; n <= length; ++n) {
        binom[n].assign(n + 1, 1);
        for (std::size_t k = 1; k < n; ++k) {
            binom[n][k] = binom[n - 1][k - 1] + binom[n - 1][k];
        }
    }

    // ways[j]: weighted count of ways to fill j positions with the sets seen so far.
    std::vector<BigInt> ways(length + 1, 0);
    ways[0] = 1;
    for (const auto& set : policy.sets()) {
        std::vector<BigInt> next(length + 1, 0);
        std::vector<BigInt> power(set.max_occurs + 1, 1);
        for (std::size_t k = 1; k <= set.max_occurs; ++k) {
            power[k] = power[k - 1] * set.size();
        }
        for (std::size_t j = 0; j <= length; ++j) {
            if (ways[j] == 0) {
                continue;
            }
            for (std::size_t k = set.min_occurs; k <= set.max_occurs && j + k <= length; ++k) {
                next[j + k] += ways[j] * binom[j + k][k] * power[k];
            }
        }
        ways = std::move(next);
    }
    return ways[length];
}

IdealSampler::IdealSampler(ValidatedPolicy policy, std::uint64_t state_limit)
    : policy_(std::move(policy)), state_limit_(state_limit) {
    std::vector<std::size_t> occurs(policy_.sets().size(), 0);
    count_ = completions(occurs, 0);
}

const BigInt& IdealSampler::completions(std::vector<std::size_t>& occurs, std::size_t filled) const {
    if (const auto it = memo_.find(occurs); it != memo_.end()) {
        return it->second;
    }
    if (memo_.size() >= state_limit_) {
        throw DomainTooLarge("ideal sampler: more than " + std::to_string(state_limit_) + " occurrence states");
    }

    const auto& sets = policy_.sets();
    const auto length = policy_.length();

    std::size_t deficit = 0;
    for (std::size_t i = 0; i < sets.size(); ++i) {
        if (occurs[i] < sets[i].min_occurs) {
            deficit += sets[i].min_occurs - occurs[i];
        }
    }

    BigInt total = 0;
    if (filled == length) {
        total = deficit == 0 ? 1 : 0;
    } else if (deficit <= length - filled) {
        for (std::size_t i = 0; i < sets.size(); ++i) {
            if (occurs[i] < sets[i].max_occurs) {
                ++occurs[i];
                total += completions(occurs, filled + 1) * sets[i].size();
                --occurs[i];
            }
        }
    }
    return memo_.emplace(occurs, std::move(total)).first->second;
}

Password IdealSampler::unrank(const BigInt& rank) const {
    if (rank < 0 || rank >= count_) {
        throw std::out_of_range("unrank: rank " + to_decimal(rank) + " outside [0, " + to_decimal(count_) + ")");
    }
    const auto& sets = policy_.sets();
    const auto& alphabet = policy_.sorted_alphabet();

    // Every state on a valid path was memoized by the constructor, so this
    // loop only reads the memo and is safe to run concurrently.
    auto lookup = [this](const std::vector<std::size_t>& occurs) -> const BigInt& {
        const auto it = memo_.find(occurs);
        if (it == memo_.end()) {
            throw std::logic_error("unrank: occurrence state missing from memo");
        }
        return it->second;
    };

    BigInt remaining = rank;
    std::vector<std::size_t> occurs(sets.size(), 0);
    std::vector<BigInt> per_char(sets.size());
    Password out;
    out.reserve(policy_.length());

    for (std::size_t pos = 0; pos < policy_.length(); ++pos) {
        for (std::size_t i = 0; i < sets.size(); ++i) {
            if (occurs[i] < sets[i].max_occurs) {
                ++occurs[i];
                per_char[i] = lookup(occurs);
                --occurs[i];
            } else {
                per_char[i] = 0;
            }
        }
        bool placed = false;
        for (char c : alphabet) {
            const auto owner = *policy_.owner_of(c);
            if (remaining < per_char[owner]) {
                out.push_back(c);
                ++occurs[owner];
                placed = true;
                break;
            }
            remaining -= per_char[owner];
        }
        if (!placed) {
            throw std::logic_error("unrank: completion counts inconsistent");
        }
    }
    return out;
}

namespace {

BigInt draw_below(const BigInt& bound, ChoiceSource& cs) {
    if (const auto small = to_u64(bound)) {
        return cs.choose(*small);
    }
    const unsigned bits = boost::multiprecision::msb(BigInt(bound - 1)) + 1;
    constexpr std::uint64_t kLimb = std::uint64_t{1} << 32;
    for (std::uint64_t attempt = 0; attempt < kRejectionLimit; ++attempt) {
        BigInt value = 0;
        unsigned filled = 0;
        while (filled < bits) {
            const unsigned take = std::min(32u, bits - filled);
            const std::uint64_t range = take == 32 ? kLimb : (std::uint64_t{1} << take);
            value |= BigInt(cs.choose(range)) << filled;
            filled += take;
        }
        if (value < bound) {
            return value;
        }
    }
    throw RejectionLimitExceeded("ideal sampler: rank draw exceeded the rejection limit");
}

}  // namespace

Password IdealSampler::sample(ChoiceSource& cs) const {
    return unrank(draw_below(count_, cs));
}

Password ideal_sample(const ValidatedPolicy& policy, ChoiceSource& cs) {
    return IdealSampler(policy).sample(cs);
}

namespace {

/// Replays a recorded prefix of choices, then extends the path with
/// zero-choices for every new decision point.
class ReplayChoiceSource final : public ChoiceSource {
public:
    explicit ReplayChoiceSource(std::vector<std::pair<std::uint64_t, std::uint64_t>>& path) : path_(path) {}

    std::uint64_t choose(std::uint64_t n) override {
        if (n == 0) {
            throw std::logic_error("choose(0) during branch enumeration");
        }
        std::uint64_t value = 0;
        if (depth_ < path_.size()) {
            if (path_[depth_].second != n) {
                throw std::logic_error("procedure is not deterministic given its choices");
            }
            value = path_[depth_].first;
        } else {
            path_.emplace_back(0, n);
        }
        ++depth_;
        product_ *= n;
        return value;
    }

    std::size_t depth() const noexcept { return depth_; }
    const BigInt& product() const noexcept { return product_; }

private:
    std::vector<std::pair<std::uint64_t, std::uint64_t>>& path_;
    std::size_t depth_ = 0;
    BigInt product_ = 1;
};

}  // namespace

std::uint64_t enumerate_branches(const ChoiceProcedure& procedure, const LeafVisitor& visit, std::uint64_t limit) {
    std::vector<std::pair<std::uint64_t, std::uint64_t>> path;  // (choice, fan-out)
    std::uint64_t leaves = 0;
    while (true) {
        ReplayChoiceSource src(path);
        const auto output = procedure(src);
        if (src.depth() != path.size()) {
            throw std::logic_error("procedure is not deterministic given its choices");
        }
        if (++leaves > limit) {
            throw DomainTooLarge("branch enumeration exceeded " + std::to_string(limit) + " leaves");
        }
        visit(output, src.product());

        while (!path.empty() && path.back().first + 1 == path.back().second) {
            path.pop_back();
        }
        if (path.empty()) {
            return leaves;
        }
        ++path.back().first;
    }
}

ExactDistribution exact_distribution(const ChoiceProcedure& procedure, std::uint64_t limit) {
    // Leaves of equal depth profile share a weight, so tally them per
    // fan-out product before touching rationals.
    std::map<std::string, std::map<BigInt, std::uint64_t>> tallies;
    enumerate_branches(
        procedure, [&](const std::string& output, const BigInt& product) { ++tallies[output][product]; }, limit);

    ExactDistribution dist;
    for (const auto& [output, by_product] : tallies) {
        Rational p = 0;
        for (const auto& [product, count] : by_product) {
            p += Rational(BigInt(count), product);
        }
        dist.entries.emplace(output, std::move(p));
    }
    return dist;
}

ExactDistribution exact_distribution(const PasswordGenerator& rpg, const ValidatedPolicy& policy,
                                     std::uint64_t limit) {
    return exact_distribution([&](ChoiceSource& cs) { return rpg(policy, cs); }, limit);
}

ExactDistribution ideal_distribution(const ValidatedPolicy& policy, std::uint64_t limit) {
    const IdealSampler sampler(policy, limit);
    if (sampler.count() > limit) {
        throw DomainTooLarge("ideal distribution: " + to_decimal(sampler.count()) +
                             " satisfying passwords exceed the limit of " + std::to_string(limit));
    }
    return exact_distribution([&](ChoiceSource& cs) { return sampler.sample(cs); }, limit);
}

}  // namespace pwref
