#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "proxyforge/problem.hpp"

namespace proxyforge::problems {

inline constexpr double kSyntheticLower = -5.0;
inline constexpr double kSyntheticUpper = 5.0;

/// Identifiers of the reduced synthetic suite.
const std::vector<std::string>& synthetic_function_ids();

struct SyntheticInstance {
    std::string function_id;
    std::size_t dim = 0;
    std::vector<double> shift;  // location of the optimum
    double known_optimum = 0.0;
};

/// Seeded instance; throws UnknownFunctionId.
SyntheticInstance synthetic_instance(std::string_view function_id, std::size_t dim, std::uint64_t seed);

/// Value of the instance at x (no bounds handling).
double evaluate_synthetic(const SyntheticInstance& instance, std::span<const double> x);

ProblemSpec to_problem(SyntheticInstance instance);

/// Shorthand for to_problem(synthetic_instance(...)).
ProblemSpec synthetic(std::string_view function_id, std::size_t dim, std::uint64_t seed);

}  // namespace proxyforge::problems
