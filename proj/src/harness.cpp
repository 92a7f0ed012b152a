#include "pwref/harness.hpp"

#include "pwref/checker.hpp"
#include "pwref/json_io.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <set>
#include <stdexcept>
#include <thread>

namespace pwref {

Histogram run_real_game(const ValidatedPolicy& policy, std::uint64_t n, ChoiceSource& cs) {
    Histogram h;
    for (std::uint64_t i = 0; i < n; ++i) {
        ++h[generate(policy, cs)];
    }
    return h;
}

Histogram run_ideal_game(const ValidatedPolicy& policy, std::uint64_t n, ChoiceSource& cs) {
    const IdealSampler sampler(policy);
    Histogram h;
    for (std::uint64_t i = 0; i < n; ++i) {
        ++h[sampler.sample(cs)];
    }
    return h;
}

void merge_into(Histogram& into, const Histogram& from) {
    for (const auto& [pw, count] : from) {
        into[pw] += count;
    }
}

std::uint64_t total_count(const Histogram& h) {
    std::uint64_t n = 0;
    for (const auto& [_, count] : h) {
        n += count;
    }
    return n;
}

EmpiricalDistribution normalize(const Histogram& h) {
    const auto n = static_cast<double>(total_count(h));
    EmpiricalDistribution out;
    for (const auto& [pw, count] : h) {
        out.emplace(pw, static_cast<double>(count) / n);
    }
    return out;
}

namespace {

std::unique_ptr<ChoiceSource> chunk_source(const SamplingConfig& config, Game game, std::uint64_t chunk) {
    std::unique_ptr<ByteSource> bytes;
    if (config.seed) {
        bytes = std::make_unique<SeededByteSource>(*config.seed, 2 * chunk + (game == Game::ideal ? 1 : 0));
    } else {
        bytes = std::make_unique<SystemByteSource>();
    }
    return make_choice_source(std::move(bytes), WordWidth{}, config.variant);
}

Histogram run_game_with(const std::function<Password(ChoiceSource&)>& draw, Game game, std::uint64_t n,
                        const SamplingConfig& config) {
    if (config.chunk_size == 0) {
        throw std::invalid_argument("sampling chunk size must be positive");
    }
    const std::uint64_t chunks = (n + config.chunk_size - 1) / config.chunk_size;
    std::atomic<std::uint64_t> next{0};
    std::mutex merge_mutex;
    Histogram merged;
    std::exception_ptr failure;

    auto worker = [&] {
        Histogram local;
        try {
            for (auto chunk = next.fetch_add(1); chunk < chunks; chunk = next.fetch_add(1)) {
                auto cs = chunk_source(config, game, chunk);
                const auto begin = chunk * config.chunk_size;
                const auto end = std::min(n, begin + config.chunk_size);
                for (auto i = begin; i < end; ++i) {
                    ++local[draw(*cs)];
                }
            }
        } catch (...) {
            std::lock_guard lock(merge_mutex);
            if (!failure) {
                failure = std::current_exception();
            }
            next.store(chunks);
            return;
        }
        std::lock_guard lock(merge_mutex);
        merge_into(merged, local);
    };

    const auto threads = static_cast<unsigned>(std::clamp<std::uint64_t>(config.threads, 1, std::max<std::uint64_t>(chunks, 1)));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back(worker);
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
    return merged;
}

}  // namespace

Histogram run_game(const ValidatedPolicy& policy, Game game, std::uint64_t n, const SamplingConfig& config) {
    if (game == Game::real) {
        return run_game_with([&](ChoiceSource& cs) { return generate(policy, cs); }, game, n, config);
    }
    const IdealSampler sampler(policy);
    return run_game_with([&](ChoiceSource& cs) { return sampler.sample(cs); }, game, n, config);
}

Rational tv_distance(const ExactDistribution& a, const ExactDistribution& b) {
    Rational sum = 0;
    for (const auto& [pw, p] : a.entries) {
        sum += abs(p - b.probability(pw));
    }
    for (const auto& [pw, q] : b.entries) {
        if (!a.entries.contains(pw)) {
            sum += q;
        }
    }
    return sum / 2;
}

double tv_distance(const EmpiricalDistribution& a, const EmpiricalDistribution& b) {
    double sum = 0.0;
    for (const auto& [pw, p] : a) {
        const auto it = b.find(pw);
        sum += std::abs(p - (it == b.end() ? 0.0 : it->second));
    }
    for (const auto& [pw, q] : b) {
        if (!a.contains(pw)) {
            sum += q;
        }
    }
    return sum / 2;
}

Rational optimal_distinguisher_advantage(const ExactDistribution& real, const ExactDistribution& ideal) {
    // Pr[adversary says "real" | real] - Pr[adversary says "real" | ideal]
    Rational guess_real_under_real = 0;
    Rational guess_real_under_ideal = 0;
    for (const auto& [pw, p] : real.entries) {
        const auto q = ideal.probability(pw);
        if (p > q) {
            guess_real_under_real += p;
            guess_real_under_ideal += q;
        }
    }
    return guess_real_under_real - guess_real_under_ideal;
}

ChiSquared chi_squared(const Histogram& observed, const ExactDistribution& expected) {
    const auto n = total_count(observed);
    if (n == 0) {
        throw std::invalid_argument("chi_squared: empty histogram");
    }
    for (const auto& [pw, count] : observed) {
        if (count > 0 && !expected.entries.contains(pw)) {
            throw std::invalid_argument("chi_squared: observed '" + pw + "' outside the expected support");
        }
    }
    double statistic = 0.0;
    for (const auto& [pw, p] : expected.entries) {
        const auto it = observed.find(pw);
        const double obs = it == observed.end() ? 0.0 : static_cast<double>(it->second);
        const double exp = static_cast<double>(n) * to_double(p);
        statistic += (obs - exp) * (obs - exp) / exp;
    }
    return {statistic, expected.support_size() - 1};
}

ChiSquared chi_squared_uniform(const Histogram& observed, std::uint64_t support_size) {
    const auto n = total_count(observed);
    if (n == 0) {
        throw std::invalid_argument("chi_squared_uniform: empty histogram");
    }
    if (support_size == 0 || observed.size() > support_size) {
        throw std::invalid_argument("chi_squared_uniform: histogram larger than the support");
    }
    const double exp = static_cast<double>(n) / static_cast<double>(support_size);
    double statistic = 0.0;
    for (const auto& [_, count] : observed) {
        const double diff = static_cast<double>(count) - exp;
        statistic += diff * diff / exp;
    }
    statistic += static_cast<double>(support_size - observed.size()) * exp;
    return {statistic, support_size - 1};
}

std::string_view to_string(GameMode mode) noexcept {
    return mode == GameMode::exact ? "exact" : "empirical";
}

GameMode parse_game_mode(std::string_view text) {
    if (text == "exact") {
        return GameMode::exact;
    }
    if (text == "empirical") {
        return GameMode::empirical;
    }
    throw std::invalid_argument("unknown audit mode '" + std::string(text) + "'");
}

namespace {

GameReport exact_report(const ValidatedPolicy& policy) {
    const auto ideal = ideal_distribution(policy);
    const auto real = exact_distribution(generate, policy);

    GameReport report;
    report.policy = policy.policy();
    report.mode = GameMode::exact;

    Rational divergence = 0;
    for (const auto& [pw, p] : real.entries) {
        if (!ideal.entries.contains(pw)) {
            throw std::logic_error("generator produced '" + pw + "', which violates the policy");
        }
    }
    std::vector<ReportRow> rows;
    rows.reserve(ideal.support_size());
    for (const auto& [pw, q] : ideal.entries) {
        const auto p = real.probability(pw);
        divergence += (p - q) * (p - q) / q;
        rows.push_back({pw, p, q});
    }

    const auto tv = tv_distance(real, ideal);
    report.tv_distance = tv;
    report.chi2_statistic = to_double(divergence);
    report.chi2_dof = ideal.support_size() - 1;
    report.advantage_estimate = to_double(optimal_distinguisher_advantage(real, ideal));
    report.per_password = std::move(rows);
    return report;
}

GameReport empirical_report(const ValidatedPolicy& policy, std::uint64_t samples, const Histogram& real,
                            const Histogram& ideal, const BigInt& count) {
    const auto support = to_u64(count);
    if (!support) {
        throw DomainTooLarge("empirical audit: satisfying set of " + to_decimal(count) +
                             " passwords does not fit a 64-bit degree-of-freedom count");
    }
    for (const auto& [pw, _] : real) {
        if (!satisfies(pw, policy.policy())) {
            throw std::logic_error("generator produced '" + pw + "', which violates the policy");
        }
    }

    const auto real_freq = normalize(real);
    const auto ideal_freq = normalize(ideal);
    const auto chi = chi_squared_uniform(real, *support);
    const auto tv = tv_distance(real_freq, ideal_freq);

    std::set<Password> seen;
    for (const auto& [pw, _] : real_freq) seen.insert(pw);
    for (const auto& [pw, _] : ideal_freq) seen.insert(pw);
    std::vector<ReportRow> rows;
    rows.reserve(seen.size());
    for (const auto& pw : seen) {
        const auto r = real_freq.find(pw);
        const auto i = ideal_freq.find(pw);
        rows.push_back({pw, r == real_freq.end() ? 0.0 : r->second, i == ideal_freq.end() ? 0.0 : i->second});
    }

    GameReport report;
    report.policy = policy.policy();
    report.mode = GameMode::empirical;
    report.samples = samples;
    report.tv_distance = tv;
    report.chi2_statistic = chi.statistic;
    report.chi2_dof = chi.dof;
    report.advantage_estimate = tv;
    report.per_password = std::move(rows);
    return report;
}

void require_samples(std::uint64_t samples) {
    if (samples == 0) {
        throw std::invalid_argument("empirical audit needs at least one sample");
    }
}

}  // namespace

GameReport advantage_report(const ValidatedPolicy& policy, GameMode mode, std::uint64_t samples,
                            const SamplingConfig& config) {
    if (mode == GameMode::exact) {
        return exact_report(policy);
    }
    require_samples(samples);
    const IdealSampler sampler(policy);
    const auto real = run_game(policy, Game::real, samples, config);
    const auto ideal = run_game(policy, Game::ideal, samples, config);
    return empirical_report(policy, samples, real, ideal, sampler.count());
}

GameReport advantage_report(const ValidatedPolicy& policy, GameMode mode, std::uint64_t samples, ChoiceSource& cs) {
    if (mode == GameMode::exact) {
        return exact_report(policy);
    }
    require_samples(samples);
    const IdealSampler sampler(policy);
    const auto real = run_real_game(policy, samples, cs);
    Histogram ideal;
    for (std::uint64_t i = 0; i < samples; ++i) {
        ++ideal[sampler.sample(cs)];
    }
    return empirical_report(policy, samples, real, ideal, sampler.count());
}

namespace {

nlohmann::json probability_to_json(const Probability& p) {
    if (const auto* r = std::get_if<Rational>(&p)) {
        return rational_to_json(*r);
    }
    return std::get<double>(p);
}

Probability probability_from_json(const nlohmann::json& doc) {
    if (doc.is_object()) {
        return rational_from_json(doc);
    }
    if (doc.is_number()) {
        return doc.get<double>();
    }
    throw std::invalid_argument("probability must be a number or {num, den}");
}

}  // namespace

nlohmann::json report_to_json(const GameReport& report) {
    nlohmann::json doc;
    doc["policy"] = policy_to_json_value(report.policy);
    doc["mode"] = std::string(to_string(report.mode));
    if (report.samples) {
        doc["samples"] = *report.samples;
    }
    doc["tv"] = probability_to_json(report.tv_distance);
    doc["chi2"] = report.chi2_statistic;
    doc["dof"] = report.chi2_dof;
    doc["advantage"] = report.advantage_estimate;
    if (report.per_password) {
        auto table = nlohmann::json::array();
        for (const auto& row : *report.per_password) {
            table.push_back({{"pw", row.password},
                             {"real", probability_to_json(row.real)},
                             {"ideal", probability_to_json(row.ideal)}});
        }
        doc["table"] = std::move(table);
    }
    return doc;
}

GameReport report_from_json(const nlohmann::json& doc) {
    GameReport report;
    report.policy = policy_from_json(doc.at("policy"));
    report.mode = parse_game_mode(doc.at("mode").get<std::string>());
    if (doc.contains("samples")) {
        report.samples = doc["samples"].get<std::uint64_t>();
    }
    report.tv_distance = probability_from_json(doc.at("tv"));
    report.chi2_statistic = doc.at("chi2").get<double>();
    report.chi2_dof = doc.at("dof").get<std::uint64_t>();
    report.advantage_estimate = doc.at("advantage").get<double>();
    if (doc.contains("table")) {
        std::vector<ReportRow> rows;
        for (const auto& row : doc["table"]) {
            rows.push_back({row.at("pw").get<std::string>(), probability_from_json(row.at("real")),
                            probability_from_json(row.at("ideal"))});
        }
        report.per_password = std::move(rows);
    }
    return report;
}

}  // namespace pwref
