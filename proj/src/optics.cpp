#include "corrcam/optics.hpp"

#include <cmath>

#include "corrcam/errors.hpp"

namespace corrcam {

void Object1D::validate() const {
    if (pixel_size <= 0) throw ConfigError("1D object: pixel_size must be positive");
    if (amplitude.empty() || amplitude.size() != phase.size())
        throw ConfigError("1D object: amplitude/phase size mismatch");
    double maxa = 0;
    for (double a : amplitude) {
        if (!std::isfinite(a) || a < 0) throw ConfigError("1D object: bad amplitude sample");
        maxa = std::max(maxa, a);
    }
    if (maxa <= 0) throw ConfigError("1D object: amplitude identically zero");
}

Object1D object_row(const ObjectSpec& obj, int iy) {
    obj.validate();
    if (iy < 0 || iy >= obj.amplitude.ny()) throw ConfigError("object row out of range");
    Object1D o;
    o.pixel_size = obj.pixel_size;
    o.amplitude.resize(obj.amplitude.nx());
    o.phase.resize(obj.amplitude.nx());
    for (int ix = 0; ix < obj.amplitude.nx(); ++ix) {
        o.amplitude[ix] = obj.amplitude(ix, iy);
        o.phase[ix] = obj.phase(ix, iy);
    }
    return o;
}

Object1D object_gaussian_1d(int n, double pixel_size, double sigma_px) {
    if (n < 2 || sigma_px <= 0) throw ConfigError("bad 1D gaussian parameters");
    Object1D o;
    o.pixel_size = pixel_size;
    o.amplitude.resize(n);
    o.phase.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double x = centered_coord(i, n);
        o.amplitude[i] = std::exp(-x * x / (2.0 * sigma_px * sigma_px));
    }
    return o;
}

ComplexField2D fourier_image(const ObjectSpec& obj, const OpticalConfig& cfg) {
    obj.validate();
    cfg.validate();
    if (obj.amplitude.nx() != obj.amplitude.ny())
        throw ConfigError("fourier_image expects a square object grid");

    const int n = obj.amplitude.nx();
    const double dx = obj.pixel_size;
    const double lf = cfg.lambda_pump * cfg.f;

    // Band edge of the sampled object, mapped to position x = lambda_p f nu.
    const double band = lf / (2.0 * dx);
    const double sensor_half_x = 0.5 * cfg.sensor_nx * cfg.pitch;
    const double sensor_half_y = 0.5 * cfg.sensor_ny * cfg.pitch;
    if (band > std::min(sensor_half_x, sensor_half_y) * (1.0 + 1e-12))
        throw ConfigError("fourier_image: scaled spectrum (half-width " + std::to_string(band) +
                          " m) exceeds the sensor half-extent; camera-plane field would alias");

    ComplexField2D out;
    out.spacing = lf / (n * dx);
    out.values = Image2D<std::complex<double>>(n, n);

    // Separable kernel e^{-2pi i x x'/(lambda_p f)}; two matrix passes.
    // On this dual grid the kernel reduces to a centered DFT, so the discrete
    // Parseval identity is exact.
    std::vector<std::complex<double>> kernel(static_cast<size_t>(n) * n);
    for (int j = 0; j < n; ++j) {
        double xp = centered_coord(j, n) * out.spacing;
        for (int i = 0; i < n; ++i) {
            double x = centered_coord(i, n) * dx;
            double ph = -2.0 * M_PI * x * xp / lf;
            kernel[static_cast<size_t>(j) * n + i] = {std::cos(ph), std::sin(ph)};
        }
    }

    // pass 1: transform rows (x -> x')
    Image2D<std::complex<double>> mid(n, n);
    for (int iy = 0; iy < n; ++iy)
        for (int j = 0; j < n; ++j) {
            std::complex<double> acc = 0;
            const std::complex<double>* krow = &kernel[static_cast<size_t>(j) * n];
            for (int ix = 0; ix < n; ++ix) acc += obj.t(ix, iy) * krow[ix];
            mid(j, iy) = acc * dx;
        }
    // pass 2: transform columns (y -> y')
    for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l) {
            std::complex<double> acc = 0;
            const std::complex<double>* krow = &kernel[static_cast<size_t>(l) * n];
            for (int iy = 0; iy < n; ++iy) acc += mid(j, iy) * krow[iy];
            out.values(j, l) = acc * dx;
        }
    return out;
}

double field_energy(const ComplexField2D& field) {
    double e = 0;
    for (const auto& v : field.values.raw()) e += std::norm(v);
    return e * field.spacing * field.spacing;
}

CorrelationImage theoretical_correlation_image(const ObjectSpec& obj, const OpticalConfig& cfg) {
    obj.validate();
    cfg.validate();
    const int bx = 2 * cfg.sensor_nx - 1, by = 2 * cfg.sensor_ny - 1;
    CorrelationImage out;
    out.values = Image2D<double>(bx, by, 0.0);
    out.pixel_pitch = cfg.pitch;

    const int nox = obj.amplitude.nx(), noy = obj.amplitude.ny();
    const double scale = cfg.f / cfg.f_prime; // object coord per unit r+
    for (int l = 0; l < by; ++l) {
        double yp = (l - (cfg.sensor_ny - 1)) * 0.5 * cfg.pitch;
        double v = -scale * yp / obj.pixel_size + 0.5 * (noy - 1);
        for (int k = 0; k < bx; ++k) {
            double xp = (k - (cfg.sensor_nx - 1)) * 0.5 * cfg.pitch;
            double u = -scale * xp / obj.pixel_size + 0.5 * (nox - 1);
            // bilinear sample of |t|^2, zero outside the object grid
            int u0 = static_cast<int>(std::floor(u)), v0 = static_cast<int>(std::floor(v));
            double fu = u - u0, fv = v - v0;
            double acc = 0;
            for (int dyy = 0; dyy <= 1; ++dyy)
                for (int dxx = 0; dxx <= 1; ++dxx) {
                    int uu = u0 + dxx, vv = v0 + dyy;
                    if (uu < 0 || uu >= nox || vv < 0 || vv >= noy) continue;
                    double w = (dxx ? fu : 1.0 - fu) * (dyy ? fv : 1.0 - fv);
                    double a = obj.amplitude(uu, vv);
                    acc += w * a * a;
                }
            out.values(k, l) = acc;
        }
    }
    double peak = image_max(out.values);
    if (peak <= 0)
        throw ConfigError("theoretical correlation image is empty: object support falls "
                          "entirely outside the sensor's sum-coordinate grid");
    for (auto& v : out.values.raw()) v /= peak;
    return out;
}

} // namespace corrcam
