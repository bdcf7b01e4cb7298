#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "proxyforge/algo/config.hpp"
#include "proxyforge/aocc.hpp"
#include "proxyforge/designer/proposer.hpp"
#include "proxyforge/ela/distribution.hpp"
#include "proxyforge/problem.hpp"

namespace proxyforge::designer {

enum class Condition { proxy_driven, benchmark_driven, real_world_direct };

const char* to_string(Condition c);
/// Throws std::invalid_argument for unknown names.
Condition condition_from_string(std::string_view name);

struct SessionSettings {
    std::size_t iterations = 100;
    std::size_t repetitions = 3;
    std::size_t budget_multiplier = 50;  // inner budget = multiplier * D
    AoccSettings aocc;

    std::size_t inner_budget(std::size_t dim) const { return budget_multiplier * dim; }
};

/// Names of the k pool entries closest to the target, ascending by
/// landscape distance, ties broken by name.
std::vector<std::string> select_proxies(const ela::FeatureDistribution& target,
                                        const std::vector<std::pair<std::string, ela::FeatureDistribution>>& pool,
                                        std::size_t k);

/// Mean AOCC of `repetitions` runs on every proxy. Run r on proxy p uses the
/// seed mix_seed(seed, p * repetitions + r), so two configs scored with the
/// same seed face identical random numbers. Evaluations are charged to the
/// ledger under `phase` (target evaluations for expensive proxies).
double score_candidate(const algo::AlgorithmConfig& config, const std::vector<ProblemSpec>& proxies,
                       std::size_t inner_budget, std::size_t repetitions, std::uint64_t seed, Phase phase,
                       BudgetLedger* ledger, const AoccSettings& aocc = {});

struct DiscoveryResult {
    Condition condition = Condition::proxy_driven;
    algo::AlgorithmConfig initial;
    double initial_score = 0.0;
    algo::AlgorithmConfig champion;
    double champion_score = 0.0;
    std::vector<HistoryEntry> history;
    BudgetLedger ledger;
    std::size_t iterations = 0;
    std::size_t repetitions = 0;
    std::size_t inner_budget = 0;
    std::vector<std::string> proxy_names;

    /// Incumbent plus the best `extra` distinct configs from the history.
    std::vector<algo::AlgorithmConfig> champions(std::size_t extra = 2) const;
    /// Evaluations a direct search on the target would have spent.
    std::size_t hypothetical_direct_evals() const { return iterations * repetitions * inner_budget; }
};

/// (1+1)-ES over configurations. The candidate of iteration i is scored on
/// run seeds derived from (seed, i); the incumbent keeps the score it was
/// accepted with, and a candidate equal to the incumbent reuses that score
/// without new runs. Proposer failures fall back to an offline small-step
/// mutation and are recorded in the history entry.
DiscoveryResult discover(Condition condition, const std::vector<ProblemSpec>& proxies, const SessionSettings& settings,
                         Proposer& proposer, std::uint64_t seed,
                         const algo::AlgorithmConfig& initial = algo::default_config());

/// Several independent sessions; the result keeps the session with the best
/// champion score, its history, the union of all histories for champion
/// extraction, and the merged ledger.
DiscoveryResult discover_sessions(Condition condition, const std::vector<ProblemSpec>& proxies,
                                  const SessionSettings& settings, Proposer& proposer, std::uint64_t seed,
                                  std::size_t sessions);

}  // namespace proxyforge::designer
