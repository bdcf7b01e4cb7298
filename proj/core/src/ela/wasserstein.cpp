#include "proxyforge/ela/wasserstein.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace proxyforge::ela {

double wasserstein_1d(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("wasserstein_1d: empty sample");
    std::vector<double> sa(a.begin(), a.end());
    std::vector<double> sb(b.begin(), b.end());
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());

    if (sa.size() == sb.size()) {
        double total = 0.0;
        for (std::size_t i = 0; i < sa.size(); ++i) total += std::abs(sa[i] - sb[i]);
        return total / static_cast<double>(sa.size());
    }

    // Walk the merged quantile breakpoints k/na and l/nb; on each interval
    // both quantile functions are constant.
    const double na = static_cast<double>(sa.size());
    const double nb = static_cast<double>(sb.size());
    std::size_t i = 0;
    std::size_t j = 0;
    double t = 0.0;
    double total = 0.0;
    while (i < sa.size() && j < sb.size()) {
        const double next_a = static_cast<double>(i + 1) / na;
        const double next_b = static_cast<double>(j + 1) / nb;
        const double next = std::min(next_a, next_b);
        total += (next - t) * std::abs(sa[i] - sb[j]);
        t = next;
        if (next_a <= next) ++i;
        if (next_b <= next) ++j;
    }
    return total;
}

}  // namespace proxyforge::ela
