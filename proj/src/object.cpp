#include "corrcam/object.hpp"

#include <cmath>

#include "corrcam/errors.hpp"

namespace corrcam {

void ObjectSpec::validate() const {
    if (pixel_size <= 0) throw ConfigError("object: pixel_size must be positive");
    if (amplitude.empty()) throw ConfigError("object: empty amplitude");
    if (!amplitude.same_shape(phase))
        throw ConfigError("object: amplitude and phase shapes differ");
    double maxa = 0;
    for (double a : amplitude.raw()) {
        if (!std::isfinite(a) || a < 0)
            throw ConfigError("object: amplitude must be finite and nonnegative");
        maxa = std::max(maxa, a);
    }
    if (maxa <= 0) throw ConfigError("object: amplitude is identically zero");
    for (double p : phase.raw())
        if (!std::isfinite(p)) throw ConfigError("object: phase must be finite");
}

namespace {

ObjectSpec blank(int n, double pixel_size) {
    if (n < 1) throw ConfigError("object: grid size must be positive");
    ObjectSpec o;
    o.amplitude = Image2D<double>(n, n, 0.0);
    o.phase = Image2D<double>(n, n, 0.0);
    o.pixel_size = pixel_size;
    return o;
}

} // namespace

ObjectSpec object_uniform(int n, double pixel_size, double amplitude) {
    ObjectSpec o = blank(n, pixel_size);
    o.amplitude.fill(amplitude);
    o.validate();
    return o;
}

ObjectSpec object_delta(int n, double pixel_size) {
    if (n % 2 == 0) throw ConfigError("delta object needs an odd grid so the sample sits on-axis");
    ObjectSpec o = blank(n, pixel_size);
    o.amplitude(n / 2, n / 2) = 1.0;
    o.validate();
    return o;
}

ObjectSpec object_disc(int n, double pixel_size, double radius_px) {
    if (radius_px <= 0) throw ConfigError("disc radius must be positive");
    ObjectSpec o = blank(n, pixel_size);
    for (int iy = 0; iy < n; ++iy)
        for (int ix = 0; ix < n; ++ix) {
            double x = centered_coord(ix, n), y = centered_coord(iy, n);
            if (x * x + y * y <= radius_px * radius_px) o.amplitude(ix, iy) = 1.0;
        }
    o.validate();
    return o;
}

ObjectSpec object_gaussian(int n, double pixel_size, double sigma_px) {
    if (sigma_px <= 0) throw ConfigError("gaussian sigma must be positive");
    ObjectSpec o = blank(n, pixel_size);
    for (int iy = 0; iy < n; ++iy)
        for (int ix = 0; ix < n; ++ix) {
            double x = centered_coord(ix, n), y = centered_coord(iy, n);
            o.amplitude(ix, iy) = std::exp(-(x * x + y * y) / (2.0 * sigma_px * sigma_px));
        }
    o.validate();
    return o;
}

ObjectSpec object_grating(int n, double pixel_size, double period_px) {
    if (period_px < 2) throw ConfigError("grating period must be at least 2 px");
    ObjectSpec o = blank(n, pixel_size);
    for (int iy = 0; iy < n; ++iy)
        for (int ix = 0; ix < n; ++ix) {
            double u = centered_coord(ix, n) / period_px;
            double frac = u - std::floor(u);
            if (frac < 0.5) o.amplitude(ix, iy) = 1.0;
        }
    o.validate();
    return o;
}

ObjectSpec object_cat(int n, double pixel_size) {
    // Sitting-cat silhouette built from a few primitives, scaled to the grid.
    // Coordinates below live in a [-1, 1]^2 box, +y up.
    ObjectSpec o = blank(n, pixel_size);
    auto inside_ellipse = [](double x, double y, double cx, double cy, double rx, double ry) {
        double dx = (x - cx) / rx, dy = (y - cy) / ry;
        return dx * dx + dy * dy <= 1.0;
    };
    auto inside_tri = [](double x, double y, double ax, double ay, double bx, double by, double cx,
                         double cy) {
        auto side = [](double x1, double y1, double x2, double y2, double px, double py) {
            return (x2 - x1) * (py - y1) - (y2 - y1) * (px - x1);
        };
        double d1 = side(ax, ay, bx, by, x, y);
        double d2 = side(bx, by, cx, cy, x, y);
        double d3 = side(cx, cy, ax, ay, x, y);
        bool neg = (d1 < 0) || (d2 < 0) || (d3 < 0);
        bool pos = (d1 > 0) || (d2 > 0) || (d3 > 0);
        return !(neg && pos);
    };
    for (int iy = 0; iy < n; ++iy)
        for (int ix = 0; ix < n; ++ix) {
            double x = 2.0 * centered_coord(ix, n) / n;
            double y = -2.0 * centered_coord(iy, n) / n; // +y up
            bool in = false;
            in = in || inside_ellipse(x, y, 0.0, -0.25, 0.42, 0.48);    // body
            in = in || inside_ellipse(x, y, 0.0, 0.38, 0.30, 0.28);     // head
            in = in || inside_tri(x, y, -0.30, 0.45, -0.06, 0.62, -0.28, 0.80); // left ear
            in = in || inside_tri(x, y, 0.30, 0.45, 0.06, 0.62, 0.28, 0.80);    // right ear
            // tail: arc of a ring on the right side
            {
                double dx = x - 0.52, dy = y + 0.55;
                double r = std::sqrt(dx * dx + dy * dy);
                double ang = std::atan2(dy, dx);
                if (r > 0.20 && r < 0.34 && ang > -1.1 && ang < 1.2) in = true;
            }
            if (in) o.amplitude(ix, iy) = 1.0;
        }
    o.validate();
    return o;
}

ObjectSpec object_two_level_phase(int n, double pixel_size, double support_radius_px,
                                  double step_radius_px, double phase_step) {
    if (support_radius_px <= 0 || step_radius_px <= 0)
        throw ConfigError("phase target radii must be positive");
    if (step_radius_px >= support_radius_px)
        throw ConfigError("phase step region must sit inside the support");
    ObjectSpec o = blank(n, pixel_size);
    for (int iy = 0; iy < n; ++iy)
        for (int ix = 0; ix < n; ++ix) {
            double x = centered_coord(ix, n), y = centered_coord(iy, n);
            double r2 = x * x + y * y;
            if (r2 <= support_radius_px * support_radius_px) {
                o.amplitude(ix, iy) = 1.0;
                if (r2 <= step_radius_px * step_radius_px) o.phase(ix, iy) = phase_step;
            }
        }
    o.validate();
    return o;
}

} // namespace corrcam
