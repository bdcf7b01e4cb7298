#include "proxyforge/ela/design.hpp"

#include <numeric>
#include <stdexcept>

namespace proxyforge::ela {

Eigen::MatrixXd latin_hypercube(std::size_t n, const std::vector<double>& lower, const std::vector<double>& upper,
                                RandomStream& rng) {
    const std::size_t d = lower.size();
    Eigen::MatrixXd X(n, d);
    std::vector<std::size_t> strata(n);
    for (std::size_t j = 0; j < d; ++j) {
        std::iota(strata.begin(), strata.end(), std::size_t{0});
        rng.shuffle(strata);
        const double width = upper[j] - lower[j];
        for (std::size_t i = 0; i < n; ++i) {
            double u = (static_cast<double>(strata[i]) + rng.uniform()) / static_cast<double>(n);
            X(i, j) = lower[j] + width * u;
        }
    }
    return X;
}

std::vector<double> evaluate_on_design(const ProblemSpec& problem, const Eigen::MatrixXd& X, std::uint64_t noise_seed) {
    const auto n = static_cast<std::size_t>(X.rows());
    BudgetedEvaluator evaluator(problem, n, noise_seed);
    std::vector<double> y(n);
    std::vector<double> row(problem.dim);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < problem.dim; ++j) row[j] = X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        y[i] = evaluator.evaluate(row);
    }
    return y;
}

DesignSample sample_design(const ProblemSpec& problem, std::size_t coef_ela, RandomStream& rng, BudgetLedger* ledger) {
    if (coef_ela < 1) throw std::invalid_argument("coef_ELA must be >= 1");
    problem.validate();
    const std::size_t n = coef_ela * problem.dim;
    DesignSample sample;
    sample.X = latin_hypercube(n, problem.lower_bounds, problem.upper_bounds, rng);
    sample.y = evaluate_on_design(problem, sample.X, rng.next_u64());
    if (ledger) {
        if (problem.expensive)
            ledger->charge_characterization(n);
        else
            ledger->charge(Phase::generation, false, n);
    }
    return sample;
}

}  // namespace proxyforge::ela
