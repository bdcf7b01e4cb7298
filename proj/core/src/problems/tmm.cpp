#include "proxyforge/problems/tmm.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "proxyforge/errors.hpp"

namespace proxyforge::problems {

namespace {

using cd = std::complex<double>;

struct Matrix2 {
    cd m11, m12, m21, m22;

    Matrix2 operator*(const Matrix2& o) const {
        return {m11 * o.m11 + m12 * o.m21, m11 * o.m12 + m12 * o.m22, m21 * o.m11 + m22 * o.m21,
                m21 * o.m12 + m22 * o.m22};
    }
};

}  // namespace

void LayerStack::validate() const {
    if (thicknesses_nm.size() != refractive_indices.size())
        throw NonPhysical("layer stack: thickness and index counts differ");
    for (std::size_t i = 0; i < thicknesses_nm.size(); ++i) {
        if (!(thicknesses_nm[i] >= 0.0)) throw NonPhysical("layer " + std::to_string(i) + ": negative thickness");
        if (!(refractive_indices[i] >= 1.0)) throw NonPhysical("layer " + std::to_string(i) + ": index below 1");
    }
    if (!(ambient_index >= 1.0)) throw NonPhysical("ambient index below 1");
    if (!(substrate_index.real() >= 1.0) || substrate_index.imag() < 0.0)
        throw NonPhysical("substrate index must have real part >= 1 and non-negative extinction");
}

OpticalResponse tmm_response(const LayerStack& stack, double wavelength_nm) {
    if (!(wavelength_nm > 0.0)) throw std::invalid_argument("wavelength must be positive");
    stack.validate();

    Matrix2 m{1.0, 0.0, 0.0, 1.0};
    const cd i{0.0, 1.0};
    for (std::size_t k = 0; k < stack.thicknesses_nm.size(); ++k) {
        const double n = stack.refractive_indices[k];
        const double delta = 2.0 * std::numbers::pi * n * stack.thicknesses_nm[k] / wavelength_nm;
        const double c = std::cos(delta);
        const double s = std::sin(delta);
        m = m * Matrix2{c, i * s / n, i * n * s, c};
    }

    const double n0 = stack.ambient_index;
    const cd ns = stack.substrate_index;
    const cd a = n0 * m.m11 + n0 * ns * m.m12;
    const cd b = m.m21 + ns * m.m22;
    const cd r = (a - b) / (a + b);
    const double denom = std::norm(a + b);

    OpticalResponse out;
    out.reflectance = std::norm(r);
    out.transmittance = 4.0 * n0 * ns.real() / denom;
    return out;
}

double tmm_reflectance(const LayerStack& stack, double wavelength_nm) {
    return tmm_response(stack, wavelength_nm).reflectance;
}

std::vector<double> wavelength_grid(double lo_nm, double hi_nm, std::size_t count) {
    std::vector<double> grid(count);
    if (count == 1) {
        grid[0] = lo_nm;
        return grid;
    }
    for (std::size_t k = 0; k < count; ++k)
        grid[k] = lo_nm + (hi_nm - lo_nm) * static_cast<double>(k) / static_cast<double>(count - 1);
    return grid;
}

}  // namespace proxyforge::problems
