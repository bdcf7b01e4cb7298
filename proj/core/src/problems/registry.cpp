#include "proxyforge/problems/registry.hpp"

#include <charconv>

#include "proxyforge/errors.hpp"
#include "proxyforge/problems/photonics.hpp"
#include "proxyforge/problems/synthetic.hpp"

namespace proxyforge::problems {

ProblemSpec make_problem(std::string_view name, std::uint64_t seed) {
    if (name == "mini-bragg") return make_bragg_problem(10);
    if (name == "bragg") return make_bragg_problem(20);
    if (name == "ellipsometry") return make_ellipsometry_problem();
    if (name == "photovoltaic") return make_photovoltaic_problem();

    constexpr std::string_view prefix = "synthetic:";
    if (name.starts_with(prefix)) {
        auto rest = name.substr(prefix.size());
        auto colon = rest.rfind(':');
        if (colon == std::string_view::npos) throw UnknownProblem("expected synthetic:<id>:<dim>, got " + std::string(name));
        auto id = rest.substr(0, colon);
        auto dim_text = rest.substr(colon + 1);
        std::size_t dim = 0;
        auto [ptr, ec] = std::from_chars(dim_text.data(), dim_text.data() + dim_text.size(), dim);
        if (ec != std::errc{} || ptr != dim_text.data() + dim_text.size() || dim == 0)
            throw UnknownProblem("bad synthetic dimension in " + std::string(name));
        return synthetic(id, dim, seed);
    }
    throw UnknownProblem("unknown problem '" + std::string(name) + "'");
}

std::vector<std::string> real_world_problem_names() { return {"mini-bragg", "bragg", "ellipsometry", "photovoltaic"}; }

bool is_registered(std::string_view name) {
    try {
        make_problem(name);
        return true;
    } catch (const Error&) {
        return false;
    }
}

}  // namespace proxyforge::problems
