#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "proxyforge/random.hpp"

namespace proxyforge {

/// Native objective. Deterministic problems ignore the noise stream; GP proxies
/// with `rand` nodes draw from it.
using Objective = std::function<double(std::span<const double> x, RandomStream& noise)>;

/// A bounded black-box objective.
///
/// `objective` returns the native value. When `maximize` is set the evaluator
/// reports `1 - value`, so every consumer minimizes. `known_optimum` and
/// `aocc_scale` live in the minimization space and only affect AOCC.
struct ProblemSpec {
    std::string name;
    std::size_t dim = 0;
    std::vector<double> lower_bounds;
    std::vector<double> upper_bounds;
    bool maximize = false;
    std::optional<double> known_optimum;
    /// Real (expensive) instance; its evaluations are charged as target evals.
    bool expensive = false;
    /// Divides (value - optimum) before AOCC normalization.
    double aocc_scale = 1.0;
    Objective objective;

    /// Throws InvalidProblem when an invariant does not hold.
    void validate() const;

    /// Objective in the minimization convention; x must already be in bounds.
    double minimized(std::span<const double> x, RandomStream& noise) const;
};

enum class Phase { generation, discovery, validation };

const char* to_string(Phase phase);

struct PhaseCounts {
    std::size_t proxy = 0;
    std::size_t target = 0;
    bool operator==(const PhaseCounts&) const = default;
};

/// Separates cheap proxy evaluations from expensive target evaluations.
///
/// Target evaluations may only be charged in the discovery phase (direct
/// mode) or the validation phase. The design sample taken on the target to
/// characterize its landscape is tracked separately as characterization.
class BudgetLedger {
public:
    void charge(Phase phase, bool target, std::size_t evaluations);
    void charge_characterization(std::size_t evaluations);
    void merge(const BudgetLedger& other);

    std::size_t proxy_evals() const;
    std::size_t target_evals() const;
    std::size_t characterization_evals() const { return characterization_; }
    const PhaseCounts& phase(Phase p) const { return phases_[static_cast<int>(p)]; }

    bool operator==(const BudgetLedger&) const = default;

private:
    PhaseCounts phases_[3];
    std::size_t characterization_ = 0;
};

struct TraceEntry {
    std::size_t eval = 0;  // 1-based evaluation index
    double raw = 0.0;      // value returned to the caller (minimization convention)
    double best = 0.0;     // best-so-far including this evaluation
    bool operator==(const TraceEntry&) const = default;
};

/// Single-owner evaluation counter that hard-stops at its budget.
class BudgetedEvaluator {
public:
    BudgetedEvaluator(ProblemSpec problem, std::size_t budget, std::uint64_t noise_seed = 0);

    /// Clips x to the box, evaluates, appends to the trace.
    /// Throws DimensionMismatch or BudgetExhausted.
    double evaluate(std::span<const double> x);

    const ProblemSpec& problem() const { return problem_; }
    std::size_t dim() const { return problem_.dim; }
    std::size_t budget() const { return budget_; }
    std::size_t used() const { return used_; }
    std::size_t remaining() const { return budget_ - used_; }
    bool exhausted() const { return used_ >= budget_; }

    const std::vector<TraceEntry>& trace() const { return trace_; }
    double best_value() const;
    const std::vector<double>& best_x() const { return best_x_; }

    /// Charges everything used so far to the ledger under `phase`.
    void charge_to(BudgetLedger& ledger, Phase phase) const;

private:
    ProblemSpec problem_;
    std::size_t budget_;
    std::size_t used_ = 0;
    RandomStream noise_;
    std::vector<TraceEntry> trace_;
    std::vector<double> best_x_;
    std::vector<double> scratch_;
};

}  // namespace proxyforge
