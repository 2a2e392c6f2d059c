#include <cmath>

#include "corrcam/analysis.hpp"
#include "corrcam/errors.hpp"

namespace corrcam {

namespace {

void check_points(const std::vector<ScalingPoint>& points, const char* what) {
    if (points.size() < 3)
        throw ConfigError(std::string(what) + ": need at least 3 points, got " +
                          std::to_string(points.size()));
    for (const auto& pt : points)
        if (!(pt.f > 0.0) || !(pt.value > 0.0))
            throw ConfigError(std::string(what) + ": focal lengths and values must be positive");
}

double r_squared(const std::vector<ScalingPoint>& points, const std::vector<double>& model) {
    double mean = 0.0;
    for (const auto& pt : points) mean += pt.value;
    mean /= static_cast<double>(points.size());
    double ss_res = 0.0, ss_tot = 0.0;
    for (size_t i = 0; i < points.size(); ++i) {
        ss_res += (points[i].value - model[i]) * (points[i].value - model[i]);
        ss_tot += (points[i].value - mean) * (points[i].value - mean);
    }
    return (ss_tot > 0.0) ? 1.0 - ss_res / ss_tot : 1.0;
}

} // namespace

double loglog_slope(const std::vector<ScalingPoint>& points) {
    check_points(points, "log-log slope");
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const double n = static_cast<double>(points.size());
    for (const auto& pt : points) {
        const double lx = std::log(pt.f), ly = std::log(pt.value);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double denom = n * sxx - sx * sx;
    if (std::fabs(denom) < 1e-300) throw ConfigError("log-log slope: all focal lengths equal");
    return (n * sxy - sx * sy) / denom;
}

PowerLawFit fit_width_scaling(const std::vector<ScalingPoint>& points) {
    check_points(points, "width scaling fit");
    // one-parameter least squares for value = a / f
    double num = 0.0, den = 0.0;
    for (const auto& pt : points) {
        num += pt.value / pt.f;
        den += 1.0 / (pt.f * pt.f);
    }
    PowerLawFit fit;
    fit.coeff = num / den;
    std::vector<double> model;
    model.reserve(points.size());
    for (const auto& pt : points) model.push_back(fit.coeff / pt.f);
    fit.r_squared = r_squared(points, model);
    fit.loglog_slope = loglog_slope(points);
    return fit;
}

PowerLawFit fit_snr_scaling(const std::vector<ScalingPoint>& points) {
    check_points(points, "snr scaling fit");
    // one-parameter least squares for value = b * f^2
    double num = 0.0, den = 0.0;
    for (const auto& pt : points) {
        const double f2 = pt.f * pt.f;
        num += pt.value * f2;
        den += f2 * f2;
    }
    PowerLawFit fit;
    fit.coeff = num / den;
    std::vector<double> model;
    model.reserve(points.size());
    for (const auto& pt : points) model.push_back(fit.coeff * pt.f * pt.f);
    fit.r_squared = r_squared(points, model);
    fit.loglog_slope = loglog_slope(points);
    return fit;
}

double ncc(const Image2D<double>& a, const Image2D<double>& b) {
    if (!a.same_shape(b)) throw ConfigError("ncc: images differ in size");
    if (a.empty()) throw ConfigError("ncc: empty image");
    const double n = static_cast<double>(a.size());
    double ma = 0.0, mb = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        ma += a.raw()[i];
        mb += b.raw()[i];
    }
    ma /= n;
    mb /= n;
    double num = 0.0, da = 0.0, db = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        const double xa = a.raw()[i] - ma, xb = b.raw()[i] - mb;
        num += xa * xb;
        da += xa * xa;
        db += xb * xb;
    }
    if (da <= 0.0 || db <= 0.0) return 0.0;
    return num / std::sqrt(da * db);
}

} // namespace corrcam
