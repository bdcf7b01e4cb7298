#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "proxyforge/problem.hpp"

namespace proxyforge::problems {

/// Resolves `mini-bragg`, `bragg`, `ellipsometry`, `photovoltaic` and
/// `synthetic:<id>:<dim>`. The seed only affects synthetic shifts.
/// Throws UnknownProblem (or UnknownFunctionId for a bad synthetic id).
ProblemSpec make_problem(std::string_view name, std::uint64_t seed = 0);

/// Names of the fixed real-world instances.
std::vector<std::string> real_world_problem_names();

bool is_registered(std::string_view name);

}  // namespace proxyforge::problems
