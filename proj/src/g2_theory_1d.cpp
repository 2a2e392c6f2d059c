#include <cmath>
#include <complex>

#include "corrcam/errors.hpp"
#include "corrcam/optics.hpp"

// Distance-general 1D two-photon propagator, evaluated exactly as the chirped
// two-stage integrals: crystal-plane field FT[t] with the (f, d) chirp, then
// two impulse-response factors h with the (f', d') chirp.  All quadratic
// phases cancel under the final modulus, which is what the distance
// independence tests exercise.

namespace corrcam {

namespace {

using cplx = std::complex<double>;

// Phase of the chirped object->crystal transform kernel:
//   (pi/lambda_p) * (x^2/f + x'^2/d - (x' f + x d)^2 / (f^2 d))
double ft_phase(double x, double xp, double lambda_p, double f, double d) {
    double q = xp * f + x * d;
    return M_PI / lambda_p * (x * x / f + xp * xp / d - q * q / (f * f * d));
}

// Phase of the impulse response h(x_cam, x'):
//   (pi/lambda) * (x'^2/d' + x_cam^2/f' - (x_cam d' + x' f')^2 / (d' f'^2))
double h_phase(double xcam, double xp, double lambda, double fp, double dp) {
    double q = xcam * dp + xp * fp;
    return M_PI / lambda * (xp * xp / dp + xcam * xcam / fp - q * q / (dp * fp * fp));
}

// Crystal-plane window: Gaussian-beam estimate from the object's RMS width
// (defocus-corrected), capped at the band limit of the object sampling.
double crystal_window(const Object1D& obj, const OpticalConfig& cfg) {
    const int n = static_cast<int>(obj.amplitude.size());
    double w = 0, wx2 = 0;
    for (int i = 0; i < n; ++i) {
        double a2 = obj.amplitude[i] * obj.amplitude[i];
        double x = centered_coord(i, n) * obj.pixel_size;
        w += a2;
        wx2 += a2 * x * x;
    }
    double sigma = std::sqrt(wx2 / w);
    if (!(sigma > 0)) sigma = obj.pixel_size;
    double sigma_ft = cfg.lambda_pump * cfg.f / (2.0 * M_PI * sigma);
    // defocus broadening of the crystal-plane spot for d != f
    double a = M_PI * (cfg.f - cfg.dist_d()) / (cfg.lambda_pump * cfg.f * cfg.f);
    double grow = std::sqrt(1.0 + 4.0 * a * a * sigma * sigma * sigma * sigma);
    double nyquist_cap = cfg.lambda_pump * cfg.f / (2.0 * obj.pixel_size);
    return std::min(8.0 * sigma_ft * grow, nyquist_cap);
}

Image2D<double> evaluate(const Object1D& obj, const OpticalConfig& cfg, int n_q) {
    const int n_obj = static_cast<int>(obj.amplitude.size());
    const int n_cam = cfg.sensor_nx;
    const double lambda = cfg.lambda_spdc();
    const double d = cfg.dist_d(), dp = cfg.dist_d_prime();
    const double xw = crystal_window(obj, cfg);
    const double dxp = 2.0 * xw / (n_q - 1);

    // stage 1: FT[t] on the crystal grid, trapezoid over the object grid
    std::vector<cplx> ft(n_q);
    for (int j = 0; j < n_q; ++j) {
        double xp = -xw + j * dxp;
        cplx acc = 0;
        for (int i = 0; i < n_obj; ++i) {
            double x = centered_coord(i, n_obj) * obj.pixel_size;
            double w = (i == 0 || i == n_obj - 1) ? 0.5 : 1.0;
            double ph = ft_phase(x, xp, cfg.lambda_pump, cfg.f, d);
            acc += w * obj.t(i) * cplx{std::cos(ph), std::sin(ph)};
        }
        ft[j] = acc * obj.pixel_size;
    }

    // stage 2: per camera pair, trapezoid over the crystal grid.  h factors
    // are separable per camera coordinate, so precompute them.
    std::vector<double> cam(n_cam);
    for (int i = 0; i < n_cam; ++i) cam[i] = centered_coord(i, n_cam) * cfg.pitch;
    std::vector<cplx> hfac(static_cast<size_t>(n_cam) * n_q);
    for (int i = 0; i < n_cam; ++i)
        for (int j = 0; j < n_q; ++j) {
            double xp = -xw + j * dxp;
            double ph = h_phase(cam[i], xp, lambda, cfg.f_prime, dp);
            hfac[static_cast<size_t>(i) * n_q + j] = {std::cos(ph), std::sin(ph)};
        }

    Image2D<double> g2(n_cam, n_cam);
    for (int i2 = 0; i2 < n_cam; ++i2)
        for (int i1 = 0; i1 < n_cam; ++i1) {
            const cplx* h1 = &hfac[static_cast<size_t>(i1) * n_q];
            const cplx* h2 = &hfac[static_cast<size_t>(i2) * n_q];
            cplx acc = 0;
            for (int j = 0; j < n_q; ++j) {
                double w = (j == 0 || j == n_q - 1) ? 0.5 : 1.0;
                acc += w * ft[j] * h1[j] * h2[j];
            }
            g2(i1, i2) = std::norm(acc * dxp);
        }
    return g2;
}

void unit_peak(Image2D<double>& m) {
    double peak = image_max(m);
    if (peak <= 0) throw ConfigError("1D propagator produced an empty map");
    for (auto& v : m.raw()) v /= peak;
}

} // namespace

int quadrature_nyquist_estimate(const Object1D& obj, const OpticalConfig& cfg) {
    obj.validate();
    cfg.validate();
    const int n_obj = static_cast<int>(obj.amplitude.size());
    const double x_obj_max = 0.5 * (n_obj - 1) * obj.pixel_size;
    const double x_cam_max = 0.5 * (cfg.sensor_nx - 1) * cfg.pitch;

    // Largest quadratic chirp phase across its own window, in cycles: the
    // defocus terms x^2(f-d)/(lambda_p f^2) and x_cam^2(f'-d')/(lambda f'^2).
    double chirp_obj = std::abs(cfg.f - cfg.dist_d()) * x_obj_max * x_obj_max /
                       (cfg.lambda_pump * cfg.f * cfg.f);
    double chirp_cam = std::abs(cfg.f_prime - cfg.dist_d_prime()) * x_cam_max * x_cam_max /
                       (cfg.lambda_spdc() * cfg.f_prime * cfg.f_prime);
    double cycles = std::max(chirp_obj, chirp_cam);
    return std::max(2, 2 * static_cast<int>(std::ceil(2.0 * cycles)));
}

G2Map1D g2_general_distance_1d(const Object1D& obj, const OpticalConfig& cfg, int n_quadrature,
                               bool check) {
    obj.validate();
    cfg.validate();
    if (n_quadrature < 4 * quadrature_nyquist_estimate(obj, cfg))
        throw ConfigError("n_quadrature below 4x the chirp Nyquist estimate (" +
                          std::to_string(quadrature_nyquist_estimate(obj, cfg)) + ")");

    G2Map1D out;
    out.values = evaluate(obj, cfg, n_quadrature);
    unit_peak(out.values);
    if (check) {
        Image2D<double> fine = evaluate(obj, cfg, 2 * n_quadrature - 1);
        unit_peak(fine);
        double err = 0;
        for (size_t i = 0; i < fine.raw().size(); ++i)
            err = std::max(err, std::abs(fine.raw()[i] - out.values.raw()[i]));
        if (err > 1e-6)
            throw ConvergenceError("quadrature unresolved: doubling n_quadrature moved the "
                                   "unit-peak map by " + std::to_string(err));
    }
    out.camera_coords.resize(cfg.sensor_nx);
    for (int i = 0; i < cfg.sensor_nx; ++i)
        out.camera_coords[i] = centered_coord(i, cfg.sensor_nx) * cfg.pitch;
    return out;
}

G2Map1D g2_confocal_theory_1d(const Object1D& obj, const OpticalConfig& cfg) {
    obj.validate();
    cfg.validate();
    const int n_cam = cfg.sensor_nx;
    const int n_obj = static_cast<int>(obj.amplitude.size());
    G2Map1D out;
    out.values = Image2D<double>(n_cam, n_cam);
    out.camera_coords.resize(n_cam);
    for (int i = 0; i < n_cam; ++i)
        out.camera_coords[i] = centered_coord(i, n_cam) * cfg.pitch;
    const double scale = cfg.f / cfg.f_prime;
    for (int i2 = 0; i2 < n_cam; ++i2)
        for (int i1 = 0; i1 < n_cam; ++i1) {
            double xplus = 0.5 * (out.camera_coords[i1] + out.camera_coords[i2]);
            double u = -scale * xplus / obj.pixel_size + 0.5 * (n_obj - 1);
            int u0 = static_cast<int>(std::floor(u));
            double fu = u - u0;
            double acc = 0;
            for (int dxx = 0; dxx <= 1; ++dxx) {
                int uu = u0 + dxx;
                if (uu < 0 || uu >= n_obj) continue;
                double a = obj.amplitude[uu];
                acc += (dxx ? fu : 1.0 - fu) * a * a;
            }
            out.values(i1, i2) = acc;
        }
    unit_peak(out.values);
    return out;
}

} // namespace corrcam
