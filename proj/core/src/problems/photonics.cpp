#include "proxyforge/problems/photonics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "proxyforge/errors.hpp"

namespace proxyforge::problems {

namespace {

constexpr std::uint64_t kEllipsometrySeed = 0x656c6c6970736fULL;
constexpr double kEllipsometryLoNm = 400.0;
constexpr double kEllipsometryHiNm = 800.0;
constexpr double kPhotovoltaicLoNm = 375.0;
constexpr double kPhotovoltaicHiNm = 750.0;

LayerStack alternating_stack(std::span<const double> thicknesses, double n_first, double n_second,
                             std::complex<double> substrate) {
    LayerStack stack;
    stack.thicknesses_nm.assign(thicknesses.begin(), thicknesses.end());
    stack.refractive_indices.resize(thicknesses.size());
    for (std::size_t i = 0; i < thicknesses.size(); ++i) stack.refractive_indices[i] = (i % 2 == 0) ? n_first : n_second;
    stack.substrate_index = substrate;
    return stack;
}

std::vector<double> reflectance_spectrum(const LayerStack& stack, const std::vector<double>& grid) {
    std::vector<double> out(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) out[k] = tmm_reflectance(stack, grid[k]);
    return out;
}

LayerStack single_layer(double thickness, double permittivity) {
    LayerStack stack;
    stack.thicknesses_nm = {thickness};
    stack.refractive_indices = {std::sqrt(permittivity)};
    stack.substrate_index = kEllipsometrySubstrateIndex;
    return stack;
}

}  // namespace

LayerStack bragg_stack(std::span<const double> thicknesses_nm) {
    return alternating_stack(thicknesses_nm, std::sqrt(kBraggPermittivityLow), std::sqrt(kBraggPermittivityHigh),
                             kBraggSubstrateIndex);
}

ProblemSpec make_bragg_problem(std::size_t n_layers) {
    if (n_layers != 10 && n_layers != 20)
        throw UnknownProblem("Bragg instances have 10 or 20 layers, got " + std::to_string(n_layers));
    ProblemSpec p;
    p.name = n_layers == 10 ? "mini-bragg" : "bragg";
    p.dim = n_layers;
    p.lower_bounds.assign(n_layers, 0.0);
    p.upper_bounds.assign(n_layers, kBraggMaxThicknessNm);
    p.maximize = true;
    p.expensive = true;
    p.objective = [](std::span<const double> x, RandomStream&) {
        return tmm_reflectance(bragg_stack(x), kBraggWavelengthNm);
    };
    return p;
}

std::array<double, 2> ellipsometry_ground_truth() {
    RandomStream rng(kEllipsometrySeed, 0);
    double t = rng.uniform(kEllipsometryMinThicknessNm, kEllipsometryMaxThicknessNm);
    double eps = rng.uniform(kEllipsometryMinPermittivity, kEllipsometryMaxPermittivity);
    return {t, eps};
}

ProblemSpec make_ellipsometry_problem() {
    const auto truth = ellipsometry_ground_truth();
    auto grid = wavelength_grid(kEllipsometryLoNm, kEllipsometryHiNm, kSpectrumPoints);
    auto reference = reflectance_spectrum(single_layer(truth[0], truth[1]), grid);

    ProblemSpec p;
    p.name = "ellipsometry";
    p.dim = 2;
    p.lower_bounds = {kEllipsometryMinThicknessNm, kEllipsometryMinPermittivity};
    p.upper_bounds = {kEllipsometryMaxThicknessNm, kEllipsometryMaxPermittivity};
    p.expensive = true;
    p.objective = [grid = std::move(grid), reference = std::move(reference)](std::span<const double> x, RandomStream&) {
        auto spectrum = reflectance_spectrum(single_layer(x[0], x[1]), grid);
        double sq = 0.0;
        for (std::size_t k = 0; k < grid.size(); ++k) {
            double d = spectrum[k] - reference[k];
            sq += d * d;
        }
        return std::sqrt(sq / static_cast<double>(grid.size()));
    };
    return p;
}

LayerStack photovoltaic_stack(std::span<const double> thicknesses_nm, bool low_index_first) {
    const double lo = std::sqrt(kPhotovoltaicPermittivityLow);
    const double hi = std::sqrt(kPhotovoltaicPermittivityHigh);
    return low_index_first ? alternating_stack(thicknesses_nm, lo, hi, kPhotovoltaicSubstrateIndex)
                           : alternating_stack(thicknesses_nm, hi, lo, kPhotovoltaicSubstrateIndex);
}

double mean_absorption(const LayerStack& stack) {
    static const auto grid = wavelength_grid(kPhotovoltaicLoNm, kPhotovoltaicHiNm, kSpectrumPoints);
    double total = 0.0;
    for (double wl : grid) {
        // Layers are lossless and the substrate is semi-infinite: everything
        // entering the substrate is absorbed there, nothing exits the back.
        auto r = tmm_response(stack, wl);
        double absorbed = r.transmittance;
        total += std::clamp(absorbed, 0.0, 1.0);
    }
    return total / static_cast<double>(grid.size());
}

ProblemSpec make_photovoltaic_problem() {
    ProblemSpec p;
    p.name = "photovoltaic";
    p.dim = 10;
    p.lower_bounds.assign(10, kPhotovoltaicMinThicknessNm);
    p.upper_bounds.assign(10, kPhotovoltaicMaxThicknessNm);
    p.maximize = true;
    p.expensive = true;
    p.objective = [](std::span<const double> x, RandomStream&) { return mean_absorption(photovoltaic_stack(x)); };
    return p;
}

}  // namespace proxyforge::problems
