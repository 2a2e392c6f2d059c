#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "corrcam/analysis.hpp"
#include "corrcam/errors.hpp"

namespace corrcam {

namespace {

constexpr int kMaxIter = 200;
constexpr double kStepTol = 1e-8;
constexpr int kNParam = 6;

// parameter vector layout: A, x0, y0, sx, sy, offset
double model(const double* p, double x, double y) {
    const double ex = (x - p[1]) / p[3];
    const double ey = (y - p[2]) / p[4];
    return p[0] * std::exp(-ex * ex) * std::exp(-ey * ey) + p[5];
}

struct FitData {
    std::vector<double> xs, ys, vs;
};

FitData collect(const Image2D<double>& img, const std::optional<Roi>& roi) {
    int x0 = 0, y0 = 0, nx = img.nx(), ny = img.ny();
    if (roi) {
        if (roi->x0 < 0 || roi->y0 < 0 || roi->nx <= 0 || roi->ny <= 0 ||
            roi->x0 + roi->nx > img.nx() || roi->y0 + roi->ny > img.ny())
            throw ConfigError("gaussian fit: roi outside the image");
        x0 = roi->x0;
        y0 = roi->y0;
        nx = roi->nx;
        ny = roi->ny;
    }
    FitData d;
    d.xs.reserve(static_cast<size_t>(nx) * ny);
    for (int j = y0; j < y0 + ny; ++j)
        for (int i = x0; i < x0 + nx; ++i) {
            d.xs.push_back(i);
            d.ys.push_back(j);
            d.vs.push_back(img(i, j));
        }
    return d;
}

// moment-based starting point
void initial_guess(const FitData& d, double* p) {
    double lo = d.vs[0], hi = d.vs[0];
    for (double v : d.vs) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (hi <= lo) throw ConfigError("gaussian fit: flat image");
    double wsum = 0.0, mx = 0.0, my = 0.0;
    for (size_t i = 0; i < d.vs.size(); ++i) {
        const double w = d.vs[i] - lo;
        wsum += w;
        mx += w * d.xs[i];
        my += w * d.ys[i];
    }
    mx /= wsum;
    my /= wsum;
    double vx = 0.0, vy = 0.0;
    for (size_t i = 0; i < d.vs.size(); ++i) {
        const double w = d.vs[i] - lo;
        vx += w * (d.xs[i] - mx) * (d.xs[i] - mx);
        vy += w * (d.ys[i] - my) * (d.ys[i] - my);
    }
    vx /= wsum;
    vy /= wsum;
    p[0] = hi - lo;
    p[1] = mx;
    p[2] = my;
    // exp(-x^2/s^2) has variance s^2/2
    p[3] = std::max(0.5, std::sqrt(2.0 * vx));
    p[4] = std::max(0.5, std::sqrt(2.0 * vy));
    p[5] = lo;
}

double sse(const FitData& d, const double* p) {
    double s = 0.0;
    for (size_t i = 0; i < d.vs.size(); ++i) {
        const double r = d.vs[i] - model(p, d.xs[i], d.ys[i]);
        s += r * r;
    }
    return s;
}

// solve (JtJ + lambda*diag(JtJ)) * delta = Jtr, 6x6 Gaussian elimination
bool solve_normal(double jtj[kNParam][kNParam], const double* jtr, double lambda, double* delta) {
    double m[kNParam][kNParam + 1];
    for (int i = 0; i < kNParam; ++i) {
        for (int j = 0; j < kNParam; ++j) m[i][j] = jtj[i][j];
        m[i][i] += lambda * std::max(jtj[i][i], 1e-12);
        m[i][kNParam] = jtr[i];
    }
    for (int c = 0; c < kNParam; ++c) {
        int piv = c;
        for (int r = c + 1; r < kNParam; ++r)
            if (std::fabs(m[r][c]) > std::fabs(m[piv][c])) piv = r;
        if (std::fabs(m[piv][c]) < 1e-300) return false;
        if (piv != c)
            for (int j = 0; j <= kNParam; ++j) std::swap(m[piv][j], m[c][j]);
        for (int r = 0; r < kNParam; ++r) {
            if (r == c) continue;
            const double fac = m[r][c] / m[c][c];
            for (int j = c; j <= kNParam; ++j) m[r][j] -= fac * m[c][j];
        }
    }
    for (int i = 0; i < kNParam; ++i) delta[i] = m[i][kNParam] / m[i][i];
    return true;
}

std::string describe(const double* p, int iter) {
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "A=%.6g x0=%.6g y0=%.6g sx=%.6g sy=%.6g offset=%.6g after %d iterations", p[0],
                  p[1], p[2], p[3], p[4], p[5], iter);
    return buf;
}

} // namespace

GaussianFitResult fit_double_gaussian(const Image2D<double>& img,
                                      std::optional<GaussianFitResult> init,
                                      std::optional<Roi> roi) {
    if (img.nx() < 3 || img.ny() < 3) throw ConfigError("gaussian fit: image too small");
    FitData d = collect(img, roi);

    double p[kNParam];
    if (init) {
        p[0] = init->amplitude;
        p[1] = init->x0;
        p[2] = init->y0;
        p[3] = init->sigma_x;
        p[4] = init->sigma_y;
        p[5] = init->offset;
        if (p[3] <= 0.0 || p[4] <= 0.0) throw ConfigError("gaussian fit: nonpositive init width");
    } else {
        initial_guess(d, p);
    }

    double cur_sse = sse(d, p);
    double lambda = 1e-3;
    const size_t n = d.vs.size();
    std::vector<double> jac(n * kNParam);

    int iter = 0;
    for (; iter < kMaxIter; ++iter) {
        // numeric Jacobian, central differences
        for (int c = 0; c < kNParam; ++c) {
            const double h = 1e-6 * std::max(1.0, std::fabs(p[c]));
            double pp[kNParam], pm[kNParam];
            std::copy(p, p + kNParam, pp);
            std::copy(p, p + kNParam, pm);
            pp[c] += h;
            pm[c] -= h;
            for (size_t i = 0; i < n; ++i)
                jac[i * kNParam + c] =
                    (model(pp, d.xs[i], d.ys[i]) - model(pm, d.xs[i], d.ys[i])) / (2.0 * h);
        }
        double jtj[kNParam][kNParam] = {{0}};
        double jtr[kNParam] = {0};
        for (size_t i = 0; i < n; ++i) {
            const double r = d.vs[i] - model(p, d.xs[i], d.ys[i]);
            const double* row = &jac[i * kNParam];
            for (int a = 0; a < kNParam; ++a) {
                jtr[a] += row[a] * r;
                for (int b = a; b < kNParam; ++b) jtj[a][b] += row[a] * row[b];
            }
        }
        for (int a = 0; a < kNParam; ++a)
            for (int b = 0; b < a; ++b) jtj[a][b] = jtj[b][a];

        // damped step with retry on SSE increase
        bool accepted = false;
        double delta[kNParam];
        for (int attempt = 0; attempt < 12; ++attempt) {
            if (!solve_normal(jtj, jtr, lambda, delta)) {
                lambda *= 10.0;
                continue;
            }
            double trial[kNParam];
            for (int a = 0; a < kNParam; ++a) trial[a] = p[a] + delta[a];
            trial[3] = std::fabs(trial[3]);
            trial[4] = std::fabs(trial[4]);
            if (trial[3] < 1e-6 || trial[4] < 1e-6) {
                lambda *= 10.0;
                continue;
            }
            // trust region on the widths: a single wild step that collapses a
            // sigma to sub-pixel scale can still lower the SSE a little, but it
            // lands on a plateau where the Jacobian is zero almost everywhere
            // and the fit dies there.  Limiting sigma to a factor of 4 per step
            // keeps the iterate in scales where the gradient can re-steer it.
            const double grow = 4.0;
            if (trial[3] < std::fabs(p[3]) / grow || trial[3] > std::fabs(p[3]) * grow ||
                trial[4] < std::fabs(p[4]) / grow || trial[4] > std::fabs(p[4]) * grow) {
                lambda *= 10.0;
                continue;
            }
            const double trial_sse = sse(d, trial);
            if (trial_sse <= cur_sse) {
                std::copy(trial, trial + kNParam, p);
                cur_sse = trial_sse;
                lambda = std::max(lambda * 0.25, 1e-12);
                accepted = true;
                break;
            }
            lambda *= 10.0;
        }
        if (!accepted) {
            // no damping level improves the SSE: we are at a stationary point
            ++iter;
            break;
        }

        // relative step size
        double step2 = 0.0, mag2 = 0.0;
        for (int a = 0; a < kNParam; ++a) {
            step2 += delta[a] * delta[a];
            mag2 += std::max(p[a] * p[a], 1.0);
        }
        if (std::sqrt(step2 / mag2) < kStepTol) {
            ++iter;
            break;
        }
    }
    if (iter >= kMaxIter)
        throw ConvergenceError("gaussian fit: no convergence in " + std::to_string(kMaxIter) +
                               " iterations; last iterate " + describe(p, iter));

    GaussianFitResult out;
    out.amplitude = p[0];
    out.x0 = p[1];
    out.y0 = p[2];
    out.sigma_x = std::fabs(p[3]);
    out.sigma_y = std::fabs(p[4]);
    out.offset = p[5];
    out.iterations = iter;
    out.rms_residual = std::sqrt(cur_sse / static_cast<double>(n));
    return out;
}

SnrResult compute_snr(const Image2D<double>& img, const GaussianFitResult& fit) {
    if (fit.sigma_x <= 0.0 || fit.sigma_y <= 0.0)
        throw ConfigError("snr: fit has nonpositive width");
    SnrResult out;
    double noise_sum = 0.0, noise_sq = 0.0;
    // Background region: a fixed outer zone of the map, not scaled by the fitted
    // spot — comparing acquisitions with different spot sizes needs the noise
    // sampled over the same physical pixels.  Bins within 2 fitted sigma of the
    // spot are excluded so an off-center or large spot never leaks in.
    const double cx = 0.5 * (img.nx() - 1), cy = 0.5 * (img.ny() - 1);
    const double r_noise = 0.4 * std::min(cx, cy);
    for (int j = 0; j < img.ny(); ++j)
        for (int i = 0; i < img.nx(); ++i) {
            const double rx = (i - fit.x0) / fit.sigma_x;
            const double ry = (j - fit.y0) / fit.sigma_y;
            const double rho = std::sqrt(rx * rx + ry * ry);
            if (rho <= 1.0) {
                out.signal_mean += img(i, j);
                ++out.spot_pixels;
            } else if (rho > 2.0 && std::hypot(i - cx, j - cy) > r_noise) {
                noise_sum += img(i, j);
                noise_sq += img(i, j) * img(i, j);
                ++out.noise_pixels;
            }
        }
    if (out.spot_pixels == 0) throw ConfigError("snr: no pixels inside the 1-sigma spot");
    if (out.noise_pixels < 2)
        throw ConfigError("snr: background region is empty; widen the image or "
                          "shrink the spot");
    out.signal_mean /= out.spot_pixels;
    const double mean = noise_sum / out.noise_pixels;
    const double var =
        std::max(0.0, (noise_sq - noise_sum * mean) / (out.noise_pixels - 1));
    out.noise_std = std::sqrt(var);
    out.snr = (out.noise_std > 0.0) ? out.signal_mean / out.noise_std
                                    : std::numeric_limits<double>::infinity();
    return out;
}

} // namespace corrcam
