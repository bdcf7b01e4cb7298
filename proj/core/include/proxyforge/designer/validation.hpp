#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "proxyforge/algo/config.hpp"
#include "proxyforge/aocc.hpp"
#include "proxyforge/designer/session.hpp"
#include "proxyforge/problem.hpp"
#include "proxyforge/run_record.hpp"

namespace proxyforge::designer {

struct ValidationSettings {
    std::size_t budget_multiplier = 50;
    std::size_t runs = 10;
    AoccSettings aocc;
};

/// All runs of one algorithm on the real target.
struct AlgorithmValidation {
    std::string name;
    algo::AlgorithmConfig config;
    std::vector<RunRecord> runs;

    std::vector<double> aoccs() const;
    double median_aocc() const;
    nlohmann::json summary() const;
};

struct ValidationReport {
    std::string problem;
    std::size_t budget = 0;
    std::size_t runs = 0;
    std::vector<AlgorithmValidation> champions;
    std::vector<AlgorithmValidation> baselines;
    /// Discovery plus champion validation (baselines excluded).
    BudgetLedger ledger;
    BudgetLedger baseline_ledger;
    std::size_t hypothetical_direct_evals = 0;
    std::size_t characterization_evals = 0;

    /// hypothetical direct-discovery target evals / actual target evals.
    double h2_ratio() const;
    /// Same with characterization evaluations added to the denominator.
    double h2_ratio_inclusive() const;
    nlohmann::json to_json() const;
};

/// Runs `runs` seeded repetitions of every algorithm on the target with a
/// budget of multiplier * D. Run j of every algorithm uses the same seed.
AlgorithmValidation validate_algorithm(const std::string& name, const algo::AlgorithmConfig& config,
                                       const ProblemSpec& target, const ValidationSettings& settings,
                                       std::uint64_t seed);

/// Validates the champions (precondition: non-empty) and, when requested,
/// the RS / DE / LSHADE baselines. `discovery` supplies the discovery ledger
/// and the hypothetical direct cost; `characterization_evals` is the size
/// of the design sample taken on the target.
ValidationReport validate(const std::vector<algo::AlgorithmConfig>& champions, const ProblemSpec& target,
                          const ValidationSettings& settings, std::uint64_t seed, const DiscoveryResult* discovery,
                          std::size_t characterization_evals = 0, bool with_baselines = false);

/// Baselines alone, named RS, DE and LSHADE.
std::vector<AlgorithmValidation> validate_baselines(const ProblemSpec& target, const ValidationSettings& settings,
                                                    std::uint64_t seed);

double median(std::vector<double> v);
/// Interquartile range with linear interpolation between order statistics.
double iqr(std::vector<double> v);

}  // namespace proxyforge::designer
