#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "corrcam/errors.hpp"
#include "corrcam/holography.hpp"

using namespace corrcam;

namespace {

CorrelationImage flat_image(int nx, int ny, double value, double pitch = 16e-6) {
    CorrelationImage im;
    im.values = Image2D<double>(nx, ny);
    im.values.fill(value);
    im.frames_used = 100;
    im.pixel_pitch = pitch;
    return im;
}

// builds the four-phase set for per-pixel amplitude/offset/phase fields
HologramSet synthetic_set(const Image2D<double>& offset, const Image2D<double>& amplitude,
                          const Image2D<double>& phi) {
    HologramSet set;
    for (int s = 0; s < 4; ++s) {
        CorrelationImage im = flat_image(offset.nx(), offset.ny(), 0.0);
        for (int j = 0; j < offset.ny(); ++j)
            for (int i = 0; i < offset.nx(); ++i)
                im.values(i, j) =
                    offset(i, j) + amplitude(i, j) * std::cos(phi(i, j) - 2.0 * kHologramPhases[size_t(s)]);
        set.gamma[size_t(s)] = im;
    }
    return set;
}

} // namespace

TEST_CASE("four-step combination inverts the fringe model exactly") {
    // random per-pixel (A, B, phi): the quadrature identity is algebraically
    // exact, so recovery should be at machine precision
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> off(1.0, 5.0), amp(0.2, 2.0),
        ph(-M_PI + 1e-6, M_PI);

    const int nx = 50, ny = 40; // 2000 pixels
    Image2D<double> a(nx, ny), b(nx, ny), phi(nx, ny);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            a(i, j) = off(rng);
            b(i, j) = amp(rng);
            phi(i, j) = ph(rng);
        }

    PhaseMap map = combine_phases(synthetic_set(a, b, phi), 0.0);
    CHECK(!map.empty);
    CHECK(map.valid_count() == nx * ny);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            REQUIRE(map.mask(i, j) == 1);
            CHECK(std::abs(wrap_phase(map.phase(i, j) - phi(i, j))) < 1e-12);
        }
}

TEST_CASE("uniform synthetic set recovers the written phase") {
    Image2D<double> a(8, 8), b(8, 8), phi(8, 8);
    a.fill(2.0);
    b.fill(2.0);
    phi.fill(M_PI / 2);
    PhaseMap map = combine_phases(synthetic_set(a, b, phi));
    for (size_t i = 0; i < map.phase.size(); ++i)
        CHECK(map.phase.raw()[i] == doctest::Approx(M_PI / 2).epsilon(1e-12));
}

TEST_CASE("zero fringe modulus leaves no valid pixels") {
    // four identical images: Gamma(0)-Gamma(pi/2) = Gamma(pi/4)-Gamma(3pi/4) = 0
    HologramSet set;
    for (int s = 0; s < 4; ++s) set.gamma[size_t(s)] = flat_image(6, 6, 3.0);
    PhaseMap map = combine_phases(set, 0.1);
    CHECK(map.empty);
    CHECK(map.valid_count() == 0);
    for (size_t i = 0; i < map.phase.size(); ++i) CHECK(std::isnan(map.phase.raw()[i]));
}

TEST_CASE("mismatched grids are rejected") {
    HologramSet set;
    for (int s = 0; s < 4; ++s) set.gamma[size_t(s)] = flat_image(6, 6, 1.0);
    set.gamma[2] = flat_image(6, 5, 1.0);
    CHECK_THROWS_AS(set.validate(), ConfigError);
    CHECK_THROWS_AS(combine_phases(set), ConfigError);
}

TEST_CASE("support threshold masks nested regions monotonically") {
    // amplitude ramp: stricter thresholds keep subsets of looser ones
    const int n = 16;
    Image2D<double> a(n, n), b(n, n), phi(n, n);
    a.fill(1.0);
    phi.fill(0.3);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) b(i, j) = double(i + n * j) / double(n * n);
    HologramSet set = synthetic_set(a, b, phi);

    PhaseMap loose = combine_phases(set, 0.05);
    PhaseMap mid = combine_phases(set, 0.2);
    PhaseMap tight = combine_phases(set, 0.5);
    CHECK(loose.valid_count() > mid.valid_count());
    CHECK(mid.valid_count() > tight.valid_count());
    for (size_t i = 0; i < tight.mask.size(); ++i) {
        if (tight.mask.raw()[i]) CHECK(mid.mask.raw()[i] == 1);
        if (mid.mask.raw()[i]) CHECK(loose.mask.raw()[i] == 1);
    }
}

TEST_CASE("wrap_phase maps onto (-pi, pi]") {
    CHECK(wrap_phase(6.0) == doctest::Approx(6.0 - 2 * M_PI).epsilon(1e-14));
    CHECK(wrap_phase(-4.0) == doctest::Approx(-4.0 + 2 * M_PI).epsilon(1e-14));
    CHECK(wrap_phase(M_PI) == doctest::Approx(M_PI));
    CHECK(wrap_phase(-M_PI) == doctest::Approx(M_PI)); // half-open: -pi wraps up
    CHECK(wrap_phase(0.0) == 0.0);
    CHECK(wrap_phase(2 * M_PI) == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("subtract_reference removes a shared instrument phase") {
    const int n = 12;
    Image2D<double> a(n, n), b(n, n), phi_obj(n, n), phi_ref(n, n);
    a.fill(3.0);
    b.fill(1.0);
    const double beta = 2.9; // wraps when added to object phases near pi
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            phi_ref(i, j) = beta;
            phi_obj(i, j) = wrap_phase(0.4 * i - 0.3 * j + beta);
        }
    PhaseMap obj = combine_phases(synthetic_set(a, b, phi_obj));
    PhaseMap ref = calibrate_reference(synthetic_set(a, b, phi_ref));
    PhaseMap diff = subtract_reference(obj, ref);
    CHECK(!diff.empty);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            REQUIRE(diff.mask(i, j) == 1);
            CHECK(std::abs(wrap_phase(diff.phase(i, j) - wrap_phase(0.4 * i - 0.3 * j))) < 1e-10);
        }
}

TEST_CASE("subtracting a map from itself gives zero everywhere") {
    Image2D<double> a(6, 6), b(6, 6), phi(6, 6);
    a.fill(1.0);
    b.fill(1.0);
    for (size_t i = 0; i < phi.size(); ++i) phi.raw()[i] = 0.1 * double(i) - 1.0;
    PhaseMap m = combine_phases(synthetic_set(a, b, phi));
    PhaseMap diff = subtract_reference(m, m);
    for (size_t i = 0; i < diff.phase.size(); ++i)
        CHECK(diff.phase.raw()[i] == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("disjoint masks produce an empty difference") {
    const int n = 8;
    Image2D<double> a(n, n), phi(n, n);
    a.fill(1.0);
    phi.fill(0.5);
    Image2D<double> b_left(n, n), b_right(n, n);
    b_left.fill(0.0);
    b_right.fill(0.0);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) (i < n / 2 ? b_left : b_right)(i, j) = 1.0;

    PhaseMap left = combine_phases(synthetic_set(a, b_left, phi), 0.5);
    PhaseMap right = combine_phases(synthetic_set(a, b_right, phi), 0.5);
    CHECK(!left.empty);
    CHECK(!right.empty);
    PhaseMap diff = subtract_reference(left, right);
    CHECK(diff.empty);
    CHECK(diff.valid_count() == 0);
}

TEST_CASE("subtract_reference rejects shape mismatches") {
    Image2D<double> a6(6, 6), phi6(6, 6), a8(8, 8), phi8(8, 8);
    a6.fill(1.0); phi6.fill(0.1); a8.fill(1.0); phi8.fill(0.1);
    PhaseMap m6 = combine_phases(synthetic_set(a6, a6, phi6));
    PhaseMap m8 = combine_phases(synthetic_set(a8, a8, phi8));
    CHECK_THROWS_AS(subtract_reference(m6, m8), ConfigError);
}

TEST_CASE("fit_phase_sweep recovers exact model parameters") {
    const double A = 3.0, B = 1.5, C = -0.9;
    std::vector<SweepPoint> pts;
    for (int i = 0; i < 10; ++i) {
        const double theta = 2 * M_PI * double(i) / 10.0;
        pts.push_back({theta, A + B * std::cos(2 * theta + C)});
    }
    SweepFit fit = fit_phase_sweep(pts);
    CHECK(fit.offset == doctest::Approx(A).epsilon(1e-10));
    CHECK(fit.amplitude == doctest::Approx(B).epsilon(1e-10));
    CHECK(std::abs(wrap_phase(fit.phase - C)) < 1e-10);
    CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("fit_phase_sweep needs at least eight points") {
    std::vector<SweepPoint> pts;
    for (int i = 0; i < 7; ++i) pts.push_back({0.3 * i, 1.0});
    CHECK_THROWS_AS(fit_phase_sweep(pts), ConfigError);
}

TEST_CASE("noisy sweep still identifies the phase and the pi period") {
    const double A = 10.0, B = 2.0, C = 1.1;
    std::mt19937_64 rng(3);
    std::normal_distribution<double> noise(0.0, 0.05);
    std::vector<SweepPoint> pts;
    for (int i = 0; i < 24; ++i) {
        const double theta = 2 * M_PI * double(i) / 24.0;
        pts.push_back({theta, A + B * std::cos(2 * theta + C) + noise(rng)});
    }
    SweepFit fit = fit_phase_sweep(pts);
    CHECK(std::abs(wrap_phase(fit.phase - C)) < 0.05);
    CHECK(fit.r_squared > 0.99);
    // the fitted curve repeats after pi, not 2 pi
    const double at0 = fit.offset + fit.amplitude * std::cos(fit.phase);
    const double atpi = fit.offset + fit.amplitude * std::cos(2 * M_PI + fit.phase);
    CHECK(at0 == doctest::Approx(atpi).epsilon(1e-12));
}

TEST_CASE("phase_sweep_curve extracts the probe pixel") {
    std::vector<double> thetas;
    std::vector<CorrelationImage> images;
    for (int i = 0; i < 9; ++i) {
        const double theta = 0.3 * i;
        CorrelationImage im = flat_image(5, 5, 0.0);
        im.values(2, 3) = 4.0 + std::cos(2 * theta);
        thetas.push_back(theta);
        images.push_back(im);
    }
    std::vector<SweepPoint> pts = phase_sweep_curve(thetas, images, 2, 3);
    REQUIRE(pts.size() == 9);
    for (int i = 0; i < 9; ++i) {
        CHECK(pts[size_t(i)].theta == thetas[size_t(i)]);
        CHECK(pts[size_t(i)].value == doctest::Approx(4.0 + std::cos(0.6 * i)));
    }

    CHECK_THROWS_AS(phase_sweep_curve(thetas, images, 5, 0), ConfigError); // out of bounds
    thetas.pop_back();
    CHECK_THROWS_AS(phase_sweep_curve(thetas, images, 2, 3), ConfigError); // size mismatch
}
