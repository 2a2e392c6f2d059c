#pragma once
#include <cstdint>

#include "corrcam/image.hpp"

namespace corrcam {

// Projected correlation map on the sum-coordinate grid.
//
// Indexing convention: for an Nx x Ny sensor the map is (2Nx-1) x (2Ny-1);
// bin (k, l) accumulates every ordered pixel pair with i1 + i2 = k and
// j1 + j2 = l.  Bin k maps back to the physical sum coordinate
// x+ = (k - (Nx-1)) * pitch / 2, so the center bin (Nx-1, Ny-1) is the optical
// axis and the bin spacing is half a pixel pitch.
struct CorrelationImage {
    Image2D<double> values;
    uint32_t frames_used = 0;
    double pixel_pitch = 0; // meters; sum-bin spacing is pixel_pitch / 2

    int sensor_nx() const { return (values.nx() + 1) / 2; }
    int sensor_ny() const { return (values.ny() + 1) / 2; }

    // Physical sum coordinate of bin k along x (same formula along y).
    double coord_x(int k) const { return (k - (sensor_nx() - 1)) * 0.5 * pixel_pitch; }
    double coord_y(int l) const { return (l - (sensor_ny() - 1)) * 0.5 * pixel_pitch; }
};

} // namespace corrcam
