#pragma once
#include <optional>
#include <string>

#include "corrcam/errors.hpp"

namespace corrcam {

// EMCCD-style detection statistics.  Stochastic gain draws an exponential
// analog gain per detected event (mean `gain`); deterministic mode multiplies
// by the mean instead, for studies where excess gain noise is not the point.
enum class GainMode { stochastic, deterministic };

struct CameraModel {
    double quantum_efficiency = 0.70;
    double dark_rate = 7e-4;   // mean noise events per pixel per frame
    double readout_sigma = 20; // additive Gaussian noise, analog counts
    double gain = 1000;        // mean analog counts per detected photon
    GainMode gain_mode = GainMode::stochastic;
    std::optional<double> threshold; // binarize: count = (raw > threshold)

    void validate() const {
        if (quantum_efficiency < 0 || quantum_efficiency > 1)
            throw ConfigError("camera: quantum_efficiency must be in [0,1]");
        if (dark_rate < 0) throw ConfigError("camera: dark_rate must be >= 0");
        if (readout_sigma < 0) throw ConfigError("camera: readout_sigma must be >= 0");
        if (gain <= 0) throw ConfigError("camera: gain must be positive");
    }
};

const char* gain_mode_name(GainMode m);
GainMode gain_mode_from_name(const std::string& s);

} // namespace corrcam
