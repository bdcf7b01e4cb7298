#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "proxyforge/problem.hpp"

namespace proxyforge::ela {

inline constexpr std::size_t kDefaultCoefEla = 150;

/// Design points (rows of X) and their objective values.
struct DesignSample {
    Eigen::MatrixXd X;
    std::vector<double> y;
    std::string sampler_id = "lhs";
};

/// Latin hypercube over the box: each dimension is split into n strata and
/// every stratum holds exactly one point.
Eigen::MatrixXd latin_hypercube(std::size_t n, const std::vector<double>& lower, const std::vector<double>& upper,
                                RandomStream& rng);

/// Minimization-convention objective values of every row of X.
std::vector<double> evaluate_on_design(const ProblemSpec& problem, const Eigen::MatrixXd& X,
                                       std::uint64_t noise_seed = 0);

/// coef_ela * D Latin-hypercube points evaluated on the problem. When a
/// ledger is given the evaluations are charged as characterization (real
/// instances) or generation-phase proxy evaluations.
DesignSample sample_design(const ProblemSpec& problem, std::size_t coef_ela, RandomStream& rng,
                           BudgetLedger* ledger = nullptr);

}  // namespace proxyforge::ela
