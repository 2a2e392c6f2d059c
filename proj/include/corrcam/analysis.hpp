#pragma once

#include <optional>
#include <vector>

#include "corrcam/estimator.hpp"
#include "corrcam/image.hpp"

// Quantitative readout of correlation images: peak-shape fitting, SNR, and
// scaling laws across focal lengths.

namespace corrcam {

// model: A * exp(-(x-x0)^2 / sx^2) * exp(-(y-y0)^2 / sy^2) + offset
// (note the single power in the denominator -- sx is the 1/e half width)
struct GaussianFitResult {
    double amplitude = 0.0;
    double x0 = 0.0, y0 = 0.0;      // pixels, in image coordinates
    double sigma_x = 0.0, sigma_y = 0.0;  // pixels, positive
    double offset = 0.0;
    int iterations = 0;
    double rms_residual = 0.0;
};

// damped Gauss-Newton least squares with a numeric Jacobian.  init overrides
// the moment-based starting point; roi restricts the fitted region.  A flat
// image raises ConfigError; hitting the iteration cap raises ConvergenceError
// (message carries the last iterate).
GaussianFitResult fit_double_gaussian(const Image2D<double>& img,
                                      std::optional<GaussianFitResult> init = std::nullopt,
                                      std::optional<Roi> roi = std::nullopt);

struct SnrResult {
    double signal_mean = 0.0;  // mean over the spot (r <= 1 sigma)
    double noise_std = 0.0;    // std over the background (r > 4 sigma)
    double snr = 0.0;
    int spot_pixels = 0;
    int noise_pixels = 0;
};

// SNR of a fitted peak: spot = pixels within 1 fitted sigma of the center
// (elliptical metric); background = pixels in the outer part of the map
// (beyond 40% of the half-extent from the image center) and at least 2 fitted
// sigma from the spot.  The background zone is fixed by the map, not the fit,
// so runs with different spot sizes are compared over the same pixels.  Empty
// spot or background raises ConfigError.
SnrResult compute_snr(const Image2D<double>& img, const GaussianFitResult& fit);

struct ScalingPoint {
    double f = 0.0;      // focal length
    double value = 0.0;  // measured width (pixels) or SNR
};

struct PowerLawFit {
    double coeff = 0.0;      // a in a/f, or b in b*f^2
    double r_squared = 0.0;
    double loglog_slope = 0.0;  // unconstrained slope of log(value) vs log(f)
};

// width(f) = a / f; needs >= 3 points, all with f > 0 and value > 0
PowerLawFit fit_width_scaling(const std::vector<ScalingPoint>& points);

// snr(f) = b * f^2; same preconditions
PowerLawFit fit_snr_scaling(const std::vector<ScalingPoint>& points);

// least-squares slope of log(value) against log(f)
double loglog_slope(const std::vector<ScalingPoint>& points);

} // namespace corrcam
