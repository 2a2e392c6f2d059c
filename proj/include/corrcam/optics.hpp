#pragma once
#include <complex>
#include <vector>

#include "corrcam/correlation.hpp"
#include "corrcam/image.hpp"
#include "corrcam/object.hpp"
#include "corrcam/optical.hpp"

namespace corrcam {

// Complex field on a uniform centered 2D grid (spacing in meters).
struct ComplexField2D {
    Image2D<std::complex<double>> values;
    double spacing = 0;
};

// 1D complex field, grid symmetric about 0.
struct Field1D {
    std::vector<std::complex<double>> samples;
    double spacing = 0;
};

// 1D object slice for the general-distance propagator.
struct Object1D {
    std::vector<double> amplitude;
    std::vector<double> phase;
    double pixel_size = 0;

    std::complex<double> t(size_t i) const { return std::polar(amplitude[i], phase[i]); }
    void validate() const;
};

Object1D object_row(const ObjectSpec& obj, int iy);
Object1D object_gaussian_1d(int n, double pixel_size, double sigma_px);

// Chirp-free 2f Fourier transform of the object at the pump wavelength,
// evaluated on the object's dual grid: n_out = n_obj per axis with spacing
// lambda_p * f / (n * pixel_size), so the position scaling is x = lambda_p f nu
// and discrete Parseval holds exactly.  Raises when the object sampling puts
// spectral content beyond the sensor's half-extent (it would alias or clip at
// the camera plane).
ComplexField2D fourier_image(const ObjectSpec& obj, const OpticalConfig& cfg);

// Total energy sum(|v|^2) * spacing^2 — Parseval partner of object energy
// sum(|t|^2) * pixel_size^2 * (lambda_p f) ... see tests.
double field_energy(const ComplexField2D& field);

// |t(-(f/f') r+)|^2 resampled (bilinear) onto the sensor sum-coordinate grid,
// unit peak: point inversion through the axis, magnification f'/f.
CorrelationImage theoretical_correlation_image(const ObjectSpec& obj, const OpticalConfig& cfg);

// --- general-distance 1D propagator -----------------------------------------

// G2(x1, x2) over the 1D camera grid (sensor_nx samples at pitch).
struct G2Map1D {
    Image2D<double> values;            // (i1, i2) -> G2(x1, x2)
    std::vector<double> camera_coords; // meters
};

// Samples needed to Nyquist-sample the largest quadratic chirp phase in the
// distance-general integrals (the defocus terms in f - d and f' - d').  The
// linear oscillations are guarded separately by the doubling check.
int quadrature_nyquist_estimate(const Object1D& obj, const OpticalConfig& cfg);

// Direct trapezoid evaluation of the chirped two-stage propagator:
//   G2(x1,x2) = | integral dx' FT[t](x') h(x1,x') h(x2,x') |^2
// with the chirped transform over the object grid and the chirped
// impulse-response factors, both with explicit d and d' dependence.  The
// quadratic phase factors cancel under the modulus, so the unit-peak result is
// distance independent.  With check=true the integral is repeated at doubled
// resolution and a mismatch raises ConvergenceError.
G2Map1D g2_general_distance_1d(const Object1D& obj, const OpticalConfig& cfg, int n_quadrature,
                               bool check = true);

// 1D restriction of the confocal theory: |t(-(f/f')(x1+x2)/2)|^2 on the same
// camera grid, unit peak.  Comparison target for the propagator.
G2Map1D g2_confocal_theory_1d(const Object1D& obj, const OpticalConfig& cfg);

} // namespace corrcam
