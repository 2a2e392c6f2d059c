#include "corrcam/camera.hpp"

#include <string>

namespace corrcam {

const char* gain_mode_name(GainMode m) {
    return m == GainMode::stochastic ? "stochastic" : "deterministic";
}

GainMode gain_mode_from_name(const std::string& s) {
    if (s == "stochastic") return GainMode::stochastic;
    if (s == "deterministic") return GainMode::deterministic;
    throw ConfigError("unknown gain_mode '" + s + "' (expected stochastic or deterministic)");
}

} // namespace corrcam
