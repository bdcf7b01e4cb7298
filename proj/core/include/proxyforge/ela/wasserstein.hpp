#pragma once

#include <span>

namespace proxyforge::ela {

/// 1-Wasserstein distance between two empirical distributions: the integral
/// of |Qa(t) - Qb(t)| over t in [0, 1].
double wasserstein_1d(std::span<const double> a, std::span<const double> b);

}  // namespace proxyforge::ela
