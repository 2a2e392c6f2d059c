#include <cmath>
#include <limits>
#include <string>

#include "corrcam/errors.hpp"
#include "corrcam/holography.hpp"

namespace corrcam {

void HologramSet::validate() const {
    const int bx = gamma[0].values.nx(), by = gamma[0].values.ny();
    if (bx <= 0 || by <= 0) throw ConfigError("hologram set: empty correlation image");
    for (const auto& g : gamma)
        if (g.values.nx() != bx || g.values.ny() != by)
            throw ConfigError("hologram set: correlation images differ in size");
}

int PhaseMap::valid_count() const {
    int n = 0;
    for (uint8_t v : mask.raw()) n += (v != 0);
    return n;
}

double wrap_phase(double a) {
    a = std::remainder(a, 2.0 * M_PI);  // (-pi, pi] up to the boundary case
    if (a <= -M_PI) a += 2.0 * M_PI;
    return a;
}

PhaseMap combine_phases(const HologramSet& set, double support_threshold) {
    set.validate();
    if (support_threshold < 0.0) throw ConfigError("combine_phases: negative support threshold");
    const auto& g0 = set.gamma[0].values.raw();
    const auto& g1 = set.gamma[1].values.raw();  // pi/4
    const auto& g2 = set.gamma[2].values.raw();  // pi/2
    const auto& g3 = set.gamma[3].values.raw();  // 3pi/4

    PhaseMap out;
    out.phase = Image2D<double>(set.nx(), set.ny());
    out.mask = Image2D<uint8_t>(set.nx(), set.ny());

    // first pass: fringe modulus, to set the support cut
    std::vector<double> modulus(g0.size());
    double peak = 0.0;
    for (size_t i = 0; i < g0.size(); ++i) {
        const double re = g0[i] - g2[i];
        const double im = g1[i] - g3[i];
        modulus[i] = std::hypot(re, im);
        peak = std::max(peak, modulus[i]);
    }
    const double cut = support_threshold * peak;

    int kept = 0;
    for (size_t i = 0; i < g0.size(); ++i) {
        if (peak > 0.0 && modulus[i] > cut) {
            out.phase.raw()[i] = std::atan2(g1[i] - g3[i], g0[i] - g2[i]);
            out.mask.raw()[i] = 1;
            ++kept;
        } else {
            out.phase.raw()[i] = std::numeric_limits<double>::quiet_NaN();
            out.mask.raw()[i] = 0;
        }
    }
    out.empty = (kept == 0);
    return out;
}

PhaseMap calibrate_reference(const HologramSet& reference_set, double support_threshold) {
    return combine_phases(reference_set, support_threshold);
}

PhaseMap subtract_reference(const PhaseMap& object, const PhaseMap& reference) {
    if (!object.phase.same_shape(reference.phase))
        throw ConfigError("subtract_reference: phase maps differ in size");
    PhaseMap out;
    out.phase = Image2D<double>(object.phase.nx(), object.phase.ny());
    out.mask = Image2D<uint8_t>(object.phase.nx(), object.phase.ny());
    int kept = 0;
    for (size_t i = 0; i < out.phase.size(); ++i) {
        if (object.mask.raw()[i] && reference.mask.raw()[i]) {
            out.phase.raw()[i] = wrap_phase(object.phase.raw()[i] - reference.phase.raw()[i]);
            out.mask.raw()[i] = 1;
            ++kept;
        } else {
            out.phase.raw()[i] = std::numeric_limits<double>::quiet_NaN();
            out.mask.raw()[i] = 0;
        }
    }
    out.empty = (kept == 0);
    return out;
}

SweepFit fit_phase_sweep(const std::vector<SweepPoint>& points) {
    if (points.size() < 8)
        throw ConfigError("phase sweep fit: need at least 8 points, got " +
                          std::to_string(points.size()));
    // linear least squares on the basis {1, cos 2theta, sin 2theta}:
    // value = A + p*cos(2t) + q*sin(2t), then B = |p + iq|, C from the signs
    double s[3][3] = {{0}}, rhs[3] = {0};
    for (const auto& pt : points) {
        const double b[3] = {1.0, std::cos(2.0 * pt.theta), std::sin(2.0 * pt.theta)};
        for (int i = 0; i < 3; ++i) {
            rhs[i] += b[i] * pt.value;
            for (int j = 0; j < 3; ++j) s[i][j] += b[i] * b[j];
        }
    }
    // 3x3 Gaussian elimination with partial pivoting (Gauss-Jordan, so the
    // reduced matrix is diagonal)
    double m[3][4];
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) m[i][j] = s[i][j];
        m[i][3] = rhs[i];
    }
    for (int c = 0; c < 3; ++c) {
        int piv = c;
        for (int r = c + 1; r < 3; ++r)
            if (std::fabs(m[r][c]) > std::fabs(m[piv][c])) piv = r;
        if (std::fabs(m[piv][c]) < 1e-300)
            throw ConfigError("phase sweep fit: degenerate theta sampling");
        if (piv != c)
            for (int j = 0; j < 4; ++j) std::swap(m[piv][j], m[c][j]);
        for (int r = 0; r < 3; ++r) {
            if (r == c) continue;
            const double fac = m[r][c] / m[c][c];
            for (int j = c; j < 4; ++j) m[r][j] -= fac * m[c][j];
        }
    }
    const double a = m[0][3] / m[0][0];
    const double p = m[1][3] / m[1][1];
    const double q = m[2][3] / m[2][2];

    SweepFit fit;
    fit.offset = a;
    fit.amplitude = std::hypot(p, q);
    // p*cos(2t) + q*sin(2t) = B*cos(2t + C) with C = atan2(-q, p)
    fit.phase = std::atan2(-q, p);

    double ss_res = 0.0, ss_tot = 0.0, mean = 0.0;
    for (const auto& pt : points) mean += pt.value;
    mean /= static_cast<double>(points.size());
    for (const auto& pt : points) {
        const double model = a + p * std::cos(2.0 * pt.theta) + q * std::sin(2.0 * pt.theta);
        ss_res += (pt.value - model) * (pt.value - model);
        ss_tot += (pt.value - mean) * (pt.value - mean);
    }
    fit.r_squared = (ss_tot > 0.0) ? 1.0 - ss_res / ss_tot : 1.0;
    return fit;
}

std::vector<SweepPoint> phase_sweep_curve(const std::vector<double>& thetas,
                                          const std::vector<CorrelationImage>& images, int probe_k,
                                          int probe_l) {
    if (thetas.size() != images.size())
        throw ConfigError("phase sweep: theta / image count mismatch");
    std::vector<SweepPoint> out;
    out.reserve(thetas.size());
    for (size_t i = 0; i < thetas.size(); ++i) {
        const auto& img = images[i].values;
        if (!img.contains(probe_k, probe_l))
            throw ConfigError("phase sweep: probe pixel outside the correlation image");
        out.push_back({thetas[i], img(probe_k, probe_l)});
    }
    return out;
}

} // namespace corrcam
