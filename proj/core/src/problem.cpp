#include "proxyforge/problem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "proxyforge/errors.hpp"

namespace proxyforge {

void ProblemSpec::validate() const {
    if (dim < 1) throw InvalidProblem(name + ": dim must be >= 1");
    if (lower_bounds.size() != dim || upper_bounds.size() != dim)
        throw InvalidProblem(name + ": bounds length differs from dim");
    for (std::size_t i = 0; i < dim; ++i) {
        if (!(lower_bounds[i] < upper_bounds[i]))
            throw InvalidProblem(name + ": lower bound not below upper bound at index " + std::to_string(i));
    }
    if (!objective) throw InvalidProblem(name + ": missing objective");
    if (!(aocc_scale > 0.0) || !std::isfinite(aocc_scale)) throw InvalidProblem(name + ": aocc_scale must be positive");
}

double ProblemSpec::minimized(std::span<const double> x, RandomStream& noise) const {
    double v = objective(x, noise);
    return maximize ? 1.0 - v : v;
}

const char* to_string(Phase phase) {
    switch (phase) {
        case Phase::generation: return "generation";
        case Phase::discovery: return "discovery";
        case Phase::validation: return "validation";
    }
    return "?";
}

void BudgetLedger::charge(Phase phase, bool target, std::size_t evaluations) {
    if (target && phase == Phase::generation)
        throw std::logic_error("target evaluations cannot be charged to the generation phase");
    auto& counts = phases_[static_cast<int>(phase)];
    (target ? counts.target : counts.proxy) += evaluations;
}

void BudgetLedger::charge_characterization(std::size_t evaluations) { characterization_ += evaluations; }

void BudgetLedger::merge(const BudgetLedger& other) {
    for (int i = 0; i < 3; ++i) {
        phases_[i].proxy += other.phases_[i].proxy;
        phases_[i].target += other.phases_[i].target;
    }
    characterization_ += other.characterization_;
}

std::size_t BudgetLedger::proxy_evals() const {
    return phases_[0].proxy + phases_[1].proxy + phases_[2].proxy;
}

std::size_t BudgetLedger::target_evals() const {
    return phases_[0].target + phases_[1].target + phases_[2].target;
}

BudgetedEvaluator::BudgetedEvaluator(ProblemSpec problem, std::size_t budget, std::uint64_t noise_seed)
    : problem_(std::move(problem)), budget_(budget), noise_(noise_seed, 0x6e6f697365ULL) {
    problem_.validate();
    if (budget_ == 0) throw std::invalid_argument("BudgetedEvaluator: budget must be positive");
    trace_.reserve(budget_);
    scratch_.resize(problem_.dim);
}

double BudgetedEvaluator::evaluate(std::span<const double> x) {
    if (x.size() != problem_.dim)
        throw DimensionMismatch("expected " + std::to_string(problem_.dim) + " coordinates, got " +
                                std::to_string(x.size()));
    if (used_ >= budget_) throw BudgetExhausted("budget of " + std::to_string(budget_) + " evaluations exhausted");
    for (std::size_t i = 0; i < problem_.dim; ++i)
        scratch_[i] = std::clamp(x[i], problem_.lower_bounds[i], problem_.upper_bounds[i]);
    double value = problem_.minimized(scratch_, noise_);
    ++used_;
    // NaN never becomes the incumbent; it ranks like +inf.
    double comparable = std::isnan(value) ? std::numeric_limits<double>::infinity() : value;
    double best = trace_.empty() ? std::numeric_limits<double>::infinity() : trace_.back().best;
    if (trace_.empty() || comparable < best) {
        best = comparable;
        best_x_ = scratch_;
    }
    trace_.push_back({used_, value, best});
    return value;
}

double BudgetedEvaluator::best_value() const {
    return trace_.empty() ? std::numeric_limits<double>::infinity() : trace_.back().best;
}

void BudgetedEvaluator::charge_to(BudgetLedger& ledger, Phase phase) const {
    if (used_ > 0) ledger.charge(phase, problem_.expensive, used_);
}

}  // namespace proxyforge
