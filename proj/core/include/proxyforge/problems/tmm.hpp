#pragma once

#include <complex>
#include <vector>

namespace proxyforge::problems {

/// Thin-film stack at normal incidence. Layer 0 faces the ambient medium.
struct LayerStack {
    std::vector<double> thicknesses_nm;
    std::vector<double> refractive_indices;
    double ambient_index = 1.0;
    /// A non-zero imaginary part models an absorbing semi-infinite substrate.
    std::complex<double> substrate_index{1.5, 0.0};

    /// Throws NonPhysical.
    void validate() const;
};

struct OpticalResponse {
    double reflectance = 0.0;
    /// Power fraction entering the substrate.
    double transmittance = 0.0;
};

/// Characteristic-matrix solution for one wavelength.
OpticalResponse tmm_response(const LayerStack& stack, double wavelength_nm);

double tmm_reflectance(const LayerStack& stack, double wavelength_nm);

/// `count` uniformly spaced wavelengths in [lo, hi].
std::vector<double> wavelength_grid(double lo_nm, double hi_nm, std::size_t count);

}  // namespace proxyforge::problems
