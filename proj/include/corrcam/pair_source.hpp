#pragma once
#include <cmath>

#include "corrcam/errors.hpp"

namespace corrcam {

enum class SourceMode { amplitude, interference };

// Photon-pair statistics.  Amplitude mode draws the pair centroid r+ from the
// object's correlation image |t(-(f/f') r+)|^2; interference mode draws it
// from the two-crystal fringe density |t(r+) + A e^{i(2 theta - beta)}|^2
// (magnification omitted there, matching the common-path geometry).  The
// centroid spread r- is an isotropic Gaussian of minus_sigma sensor pixels:
// r1 = r+ + r-, r2 = r+ - r-.
struct PairSourceConfig {
    SourceMode mode = SourceMode::amplitude;
    double mean_pairs_per_frame = 20;
    double minus_sigma = 1.5; // sensor pixels
    double theta = 0;         // SLM phase, interference mode
    double reference_amplitude = 1;
    // Interferometer unbalance beta: the reference term is e^{i(2 theta - beta)},
    // so a reference (no-object-phase) holography run retrieves exactly beta.
    double instrument_phase = 0;

    void validate() const {
        if (mean_pairs_per_frame <= 0)
            throw ConfigError("pair source: mean_pairs_per_frame must be positive");
        if (minus_sigma <= 0) throw ConfigError("pair source: minus_sigma must be positive");
        if (theta < 0 || theta >= 2 * M_PI)
            throw ConfigError("pair source: theta must lie in [0, 2pi)");
        if (mode == SourceMode::interference && reference_amplitude <= 0)
            throw ConfigError("pair source: reference_amplitude must be positive");
    }
};

} // namespace corrcam
