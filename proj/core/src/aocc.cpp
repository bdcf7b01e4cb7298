#include "proxyforge/aocc.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "proxyforge/errors.hpp"

namespace proxyforge {

double aocc(std::span<const double> best_so_far, std::size_t budget, double clip_lo, double clip_hi) {
    if (!(clip_lo > 0.0) || !(clip_lo < clip_hi))
        throw InvalidClipRange("AOCC clip range requires 0 < clip_lo < clip_hi");
    if (best_so_far.empty()) throw std::invalid_argument("aocc: empty trace");
    if (budget == 0) throw std::invalid_argument("aocc: budget must be positive");

    const double log_lo = std::log10(clip_lo);
    const double span = std::log10(clip_hi) - log_lo;
    auto normalized = [&](double y) {
        if (std::isnan(y)) throw std::invalid_argument("aocc: NaN in trace");
        double c = std::clamp(y, clip_lo, clip_hi);
        return (std::log10(c) - log_lo) / span;
    };

    double total = 0.0;
    const std::size_t n = std::min(budget, best_so_far.size());
    for (std::size_t t = 0; t < n; ++t) total += 1.0 - normalized(best_so_far[t]);
    if (n < budget) total += static_cast<double>(budget - n) * (1.0 - normalized(best_so_far[n - 1]));
    return std::clamp(total / static_cast<double>(budget), 0.0, 1.0);
}

double run_aocc(const std::vector<TraceEntry>& trace, const ProblemSpec& problem, std::size_t budget,
                const AoccSettings& settings) {
    const double offset = problem.known_optimum.value_or(0.0);
    std::vector<double> gaps;
    gaps.reserve(trace.size());
    for (const auto& e : trace) gaps.push_back((e.best - offset) / problem.aocc_scale);
    return aocc(gaps, budget, settings.clip_lo, settings.clip_hi);
}

}  // namespace proxyforge
