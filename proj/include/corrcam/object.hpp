#pragma once
#include <complex>
#include <string>

#include "corrcam/image.hpp"

namespace corrcam {

// Complex transmission object t = amplitude * exp(i*phase) sampled on a
// uniform grid with physical pixel_size (meters).  Amplitude is nonnegative
// with at least one strictly positive sample; phase is unconstrained real.
struct ObjectSpec {
    Image2D<double> amplitude;
    Image2D<double> phase;
    double pixel_size = 0;

    std::complex<double> t(int ix, int iy) const {
        return std::polar(amplitude(ix, iy), phase(ix, iy));
    }

    void validate() const;
};

// Built-in test objects.  Geometry parameters are in object-grid pixels; the
// physical scale comes from pixel_size alone.
ObjectSpec object_uniform(int n, double pixel_size, double amplitude = 1.0);
ObjectSpec object_delta(int n, double pixel_size);                    // n must be odd
ObjectSpec object_disc(int n, double pixel_size, double radius_px);
ObjectSpec object_gaussian(int n, double pixel_size, double sigma_px);
ObjectSpec object_grating(int n, double pixel_size, double period_px); // binary vertical bars
ObjectSpec object_cat(int n, double pixel_size);                       // binary silhouette
// Flat-amplitude disc of support_radius_px carrying a phase step inside
// step_radius_px; the classic two-level phase target.
ObjectSpec object_two_level_phase(int n, double pixel_size, double support_radius_px,
                                  double step_radius_px, double phase_step);

} // namespace corrcam
