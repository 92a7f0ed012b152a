#pragma once

#include "pwref/bignum.hpp"
#include "pwref/generator.hpp"
#include "pwref/oracle.hpp"
#include "pwref/policy.hpp"
#include "pwref/rng.hpp"

#include "json.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

namespace pwref {

using Histogram = std::map<Password, std::uint64_t>;
using EmpiricalDistribution = std::map<Password, double>;

/// n calls to generate(), tallied.
Histogram run_real_game(const ValidatedPolicy& policy, std::uint64_t n, ChoiceSource& cs);
/// n calls to the ideal uniform sampler, tallied.
Histogram run_ideal_game(const ValidatedPolicy& policy, std::uint64_t n, ChoiceSource& cs);

void merge_into(Histogram& into, const Histogram& from);
std::uint64_t total_count(const Histogram& h);
EmpiricalDistribution normalize(const Histogram& h);

enum class Game { real, ideal };

/// How sampling loops draw randomness. Samples are split into fixed-size
/// chunks and chunk k of a game reads its own stream, so with a seed the
/// merged histogram does not depend on the thread count.
struct SamplingConfig {
    std::optional<std::uint64_t> seed;  ///< absent: OS CSPRNG
    RngVariant variant = RngVariant::chrome;
    unsigned threads = 1;
    std::uint64_t chunk_size = 4096;
};

Histogram run_game(const ValidatedPolicy& policy, Game game, std::uint64_t n, const SamplingConfig& config);

/// Half the L1 distance over the union of supports.
Rational tv_distance(const ExactDistribution& a, const ExactDistribution& b);
double tv_distance(const EmpiricalDistribution& a, const EmpiricalDistribution& b);

/// Advantage of the maximum-likelihood one-query adversary that answers
/// "real" exactly when real(x) > ideal(x): sum of the positive parts of
/// real - ideal. Equals tv_distance; computed separately as a cross-check.
Rational optimal_distinguisher_advantage(const ExactDistribution& real, const ExactDistribution& ideal);

struct ChiSquared {
    double statistic = 0.0;
    std::uint64_t dof = 0;
};

/// Pearson statistic of `observed` against `expected` over expected's
/// support. Throws std::invalid_argument if observed has mass off that
/// support or is empty.
ChiSquared chi_squared(const Histogram& observed, const ExactDistribution& expected);

/// Same statistic against the uniform law on `support_size` outcomes, of
/// which `observed` must name only members. Unobserved cells contribute
/// n / support_size each, so the support never has to be listed.
ChiSquared chi_squared_uniform(const Histogram& observed, std::uint64_t support_size);

enum class GameMode { exact, empirical };

std::string_view to_string(GameMode mode) noexcept;
GameMode parse_game_mode(std::string_view text);

using Probability = std::variant<Rational, double>;

struct ReportRow {
    Password password;
    Probability real;
    Probability ideal;

    friend bool operator==(const ReportRow&, const ReportRow&) = default;
};

struct GameReport {
    Policy policy;
    GameMode mode = GameMode::exact;
    std::optional<std::uint64_t> samples;
    Probability tv_distance;
    double chi2_statistic = 0.0;
    std::uint64_t chi2_dof = 0;
    double advantage_estimate = 0.0;
    std::optional<std::vector<ReportRow>> per_password;

    friend bool operator==(const GameReport&, const GameReport&) = default;
};

/// Exact mode: both output laws by enumeration; tv is exact, advantage is
/// the optimal one-query adversary's, chi2 is the Pearson divergence
/// sum (real - ideal)^2 / ideal (the per-sample expected statistic).
/// Empirical mode: `samples` draws from each game, plug-in tv from the
/// normalized histograms, chi2 of the real histogram against the uniform
/// ideal law. Throws DomainTooLarge when the oracles cannot cover the policy.
GameReport advantage_report(const ValidatedPolicy& policy, GameMode mode, std::uint64_t samples,
                            const SamplingConfig& config);

/// Single-source variant: the real game then the ideal game read `cs` in turn.
GameReport advantage_report(const ValidatedPolicy& policy, GameMode mode, std::uint64_t samples, ChoiceSource& cs);

nlohmann::json report_to_json(const GameReport& report);
GameReport report_from_json(const nlohmann::json& doc);

}  // namespace pwref
