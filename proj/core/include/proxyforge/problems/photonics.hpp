#pragma once

#include <array>
#include <span>
#include <vector>

#include "proxyforge/problem.hpp"
#include "proxyforge/problems/tmm.hpp"

namespace proxyforge::problems {

// Bragg mirror: alternating low/high permittivity layers, low index on top,
// on an n = 1.5 substrate.
inline constexpr double kBraggPermittivityLow = 1.96;
inline constexpr double kBraggPermittivityHigh = 3.24;
inline constexpr double kBraggMaxThicknessNm = 218.0;
inline constexpr double kBraggWavelengthNm = 600.0;
inline constexpr double kBraggSubstrateIndex = 1.5;

inline constexpr double kEllipsometryMinThicknessNm = 50.0;
inline constexpr double kEllipsometryMaxThicknessNm = 150.0;
inline constexpr double kEllipsometryMinPermittivity = 1.1;
inline constexpr double kEllipsometryMaxPermittivity = 3.0;
inline constexpr double kEllipsometrySubstrateIndex = 3.5;

inline constexpr double kPhotovoltaicMinThicknessNm = 30.0;
inline constexpr double kPhotovoltaicMaxThicknessNm = 250.0;
inline constexpr double kPhotovoltaicPermittivityLow = 2.0;
inline constexpr double kPhotovoltaicPermittivityHigh = 3.0;
inline constexpr std::complex<double> kPhotovoltaicSubstrateIndex{3.5, 0.1};

inline constexpr std::size_t kSpectrumPoints = 100;

LayerStack bragg_stack(std::span<const double> thicknesses_nm);

/// n_layers must be 10 (mini-Bragg) or 20 (Bragg).
ProblemSpec make_bragg_problem(std::size_t n_layers);

/// (thickness_nm, permittivity) of the hidden layer that produced the
/// reference spectrum.
std::array<double, 2> ellipsometry_ground_truth();
ProblemSpec make_ellipsometry_problem();

LayerStack photovoltaic_stack(std::span<const double> thicknesses_nm, bool low_index_first = true);
/// Mean absorbed fraction over 375-750 nm.
double mean_absorption(const LayerStack& stack);
ProblemSpec make_photovoltaic_problem();

}  // namespace proxyforge::problems
