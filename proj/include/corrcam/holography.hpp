#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "corrcam/correlation.hpp"
#include "corrcam/image.hpp"

// Four-step phase-shifting holography on sum-coordinate correlation images.
// The pump phase theta enters the correlation doubled, so Gamma(theta) =
// A + B*cos(phi - 2*theta) and the quadrature combination
//   Gamma(0) - Gamma(pi/2) + i*(Gamma(pi/4) - Gamma(3pi/4)) = 2B*exp(i*phi)
// recovers phi = theta_t + theta_ref per pixel.  A reference run with a
// plain (phase-flat) object calibrates theta_ref; subtraction leaves the
// object phase.

namespace corrcam {

// the four pump phases, in radians, in storage order
inline constexpr std::array<double, 4> kHologramPhases = {
    0.0, 0.78539816339744830961, 1.57079632679489661923, 2.35619449019234492885};

struct HologramSet {
    // correlation images at theta = 0, pi/4, pi/2, 3pi/4 (same grid each)
    std::array<CorrelationImage, 4> gamma;

    int nx() const { return gamma[0].values.nx(); }
    int ny() const { return gamma[0].values.ny(); }
    double pixel_pitch() const { return gamma[0].pixel_pitch; }

    // all four present with identical dimensions; throws ConfigError otherwise
    void validate() const;
};

// Per-pixel phase with a validity mask.  Pixels outside the interference
// support (fringe modulus below threshold) hold NaN and mask 0.
struct PhaseMap {
    Image2D<double> phase;    // radians, wrapped to (-pi, pi]; NaN where invalid
    Image2D<uint8_t> mask;    // 1 = valid, 0 = rejected
    bool empty = false;       // no valid pixel survived

    int valid_count() const;
};

// quadrature combination of a four-phase set.  support_threshold rejects
// pixels whose fringe modulus 2B falls below threshold * max(2B).
PhaseMap combine_phases(const HologramSet& set, double support_threshold = 0.1);

// reference calibration: same combination, run on the reference stacks
PhaseMap calibrate_reference(const HologramSet& reference_set, double support_threshold = 0.1);

// per-pixel wrapped difference object - reference; mask is the intersection.
// A disjoint mask yields an empty (all-invalid) map with empty = true.
PhaseMap subtract_reference(const PhaseMap& object, const PhaseMap& reference);

// wrap an angle into (-pi, pi]
double wrap_phase(double a);

// --- phase sweep diagnostics ---------------------------------------------

struct SweepPoint {
    double theta;  // pump phase setting
    double value;  // Gamma at the probe pixel (or mean over a probe window)
};

struct SweepFit {
    double offset = 0.0;     // A
    double amplitude = 0.0;  // B >= 0
    double phase = 0.0;      // C, model A + B*cos(2*theta + C)
    double r_squared = 0.0;
};

// least-squares fit of value(theta) = A + B*cos(2*theta + C) over >= 8 points
SweepFit fit_phase_sweep(const std::vector<SweepPoint>& points);

// extracts one probe pixel from each of a list of correlation images; probe
// coordinates are bin indices into the sum-coordinate grid
std::vector<SweepPoint> phase_sweep_curve(const std::vector<double>& thetas,
                                          const std::vector<CorrelationImage>& images, int probe_k,
                                          int probe_l);

} // namespace corrcam
