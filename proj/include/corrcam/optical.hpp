#pragma once
#include "corrcam/errors.hpp"

namespace corrcam {

// Two-lens far-field geometry: crystal -> (distance d) lens f -> object ->
// lens f' -> (distance d') camera.  Defaults are the confocal case d = f,
// d' = f', where the camera sits in the exact Fourier plane.  The correlation
// image of the object appears inverted and scaled by f/f'.
struct OpticalConfig {
    double lambda_pump = 405e-9; // meters; SPDC photons at 2 * lambda_pump
    double f = 100e-3;
    double f_prime = 50e-3;
    double d = -1;       // crystal-to-first-lens; negative means "use f"
    double d_prime = -1; // second-lens-to-camera; negative means "use f'"
    double pitch = 16e-6;
    int sensor_nx = 64;
    int sensor_ny = 64;

    double lambda_spdc() const { return 2.0 * lambda_pump; }
    double dist_d() const { return d < 0 ? f : d; }
    double dist_d_prime() const { return d_prime < 0 ? f_prime : d_prime; }
    // Object-to-sensor scale factor: r+ = -(f'/f) * r_object, i.e. a feature of
    // size s on the object spans s * f'/f on the camera (and is inverted).
    double magnification() const { return f / f_prime; }

    void validate() const {
        if (lambda_pump <= 0) throw ConfigError("optics: pump wavelength must be positive");
        if (f <= 0 || f_prime <= 0) throw ConfigError("optics: focal lengths must be positive");
        if (dist_d() <= 0 || dist_d_prime() <= 0)
            throw ConfigError("optics: propagation distances must be positive");
        if (pitch <= 0) throw ConfigError("optics: pixel pitch must be positive");
        if (sensor_nx < 2 || sensor_ny < 2)
            throw ConfigError("optics: sensor must be at least 2x2");
    }
};

} // namespace corrcam
