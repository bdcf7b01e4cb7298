#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "proxyforge/algo/config.hpp"
#include "proxyforge/aocc.hpp"
#include "proxyforge/problem.hpp"
#include "proxyforge/run_record.hpp"

namespace proxyforge::algo {

inline constexpr std::size_t kMemorySize = 6;
inline constexpr std::size_t kFinalPopulation = 4;

struct RunOptions {
    /// When set, the evaluations are charged to record.ledger under this phase.
    std::optional<Phase> phase;
    /// Rows used as the first population instead of uniform sampling.
    std::vector<std::vector<double>> initial_population;
    AoccSettings aocc;
    /// Algorithm name stored in the record; defaults to config.label().
    std::string label;
    /// Called with the population best after every completed generation.
    std::function<void(double)> on_generation;
};

/// Runs the configured algorithm until the evaluator's budget is spent.
/// Throws InvalidConfig on an invalid config and std::invalid_argument when
/// the evaluator has already been used.
RunRecord run(const AlgorithmConfig& config, BudgetedEvaluator& evaluator, std::uint64_t seed,
              const RunOptions& options = {});

/// Population size actually used for a problem of dimension dim.
std::size_t resolved_population(const AlgorithmConfig& config, std::size_t dim);

}  // namespace proxyforge::algo
