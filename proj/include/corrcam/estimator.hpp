#pragma once
#include <cstdint>
#include <vector>

#include "corrcam/correlation.hpp"
#include "corrcam/frame_source.hpp"
#include "corrcam/image.hpp"

namespace corrcam {

// Mean frame: I(i,j) = (1/M) sum_m I_m(i,j).
Image2D<double> intensity_image(const FrameSource& source, int workers = 1);

struct Roi {
    int x0 = 0, y0 = 0, nx = 0, ny = 0;
};

// Pairwise correlation with accidental subtraction over a region of interest:
//   G2(a, b) = (1/M) sum_m I_m(a) I_m(b) - (1/(M-1)) sum_{m<M-1} I_m(a) I_{m+1}(b)
// for pixels a, b inside the roi.  a is the (i,j) slot, b the (k,l) slot; the
// accidental term is ordered (frame m at a, frame m+1 at b).
struct G2Volume {
    Roi roi;
    std::vector<double> values; // [a * roi_pixels + b], row-major pixel flattening

    size_t roi_pixels() const { return static_cast<size_t>(roi.nx) * roi.ny; }
    double at(int i, int j, int k, int l) const {
        size_t a = static_cast<size_t>(j - roi.y0) * roi.nx + (i - roi.x0);
        size_t b = static_cast<size_t>(l - roi.y0) * roi.nx + (k - roi.x0);
        return values[a * roi_pixels() + b];
    }
};

// Default 4D volume budget: the full volume must fit in memory_budget bytes.
G2Volume g2_volume(const FrameSource& source, const Roi& roi,
                   size_t memory_budget = size_t{256} << 20);

// Reference evaluation of the sum-coordinate projection
//   Gamma+(k,l) = sum_i sum_j G2(k-i, l-j, i, j)
// by exact nested loops (per-frame outer products), double precision,
// excluding the same-pixel pair (k-i, l-j) = (i, j): a photon-counting
// camera cannot see two photons in one pixel, and that term is pure
// per-pixel noise variance (it would deposit a pedestal on the even-even
// bins).  Single-threaded; the oracle the fast path is held to.
CorrelationImage correlation_image_direct(const FrameSource& source);

// Same values (same-pixel exclusion included) via zero-padded FFT
// convolutions (linear, not circular, on the (2Nx-1) x (2Ny-1) grid),
// streaming over frames with O(sensor) memory.  Frame-parallel with a fixed
// block fold: results are bitwise identical for any worker count.  Must
// agree with the direct path to 1e-9 relative.
CorrelationImage correlation_image_fft(const FrameSource& source, int workers = 1);

} // namespace corrcam
