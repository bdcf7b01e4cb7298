#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "proxyforge/problem.hpp"

namespace proxyforge {

/// Log-scaled, clipped normalization bounds for AOCC.
struct AoccSettings {
    double clip_lo = 1e-8;
    double clip_hi = 1e2;
};

/// Area over the convergence curve of a best-so-far trace.
///
/// AOCC = (1/B) * sum_{t=1..B} (1 - norm(y_t)) with
/// norm(y) = (log10(clip(y)) - log10(lo)) / (log10(hi) - log10(lo)).
/// Traces shorter than B are padded with their final value; longer traces
/// are truncated. Throws InvalidClipRange unless 0 < clip_lo < clip_hi.
double aocc(std::span<const double> best_so_far, std::size_t budget, double clip_lo, double clip_hi);

/// AOCC of an evaluator trace on `problem`: the gap (best - known_optimum)
/// divided by problem.aocc_scale is normalized, or the raw best when no
/// optimum is known.
double run_aocc(const std::vector<TraceEntry>& trace, const ProblemSpec& problem, std::size_t budget,
                const AoccSettings& settings = {});

}  // namespace proxyforge
