#pragma once
#include <cstdint>
#include <vector>

#include "corrcam/camera.hpp"
#include "corrcam/frame_source.hpp"
#include "corrcam/frame_stack.hpp"
#include "corrcam/object.hpp"
#include "corrcam/optical.hpp"
#include "corrcam/pair_source.hpp"
#include "corrcam/rng.hpp"

namespace corrcam {

// Photon pair in continuous sensor pixel coordinates (pixel i spans
// [i-0.5, i+0.5); a photon at position p lands on pixel lround(p)).
struct PhotonPair {
    double x1, y1, x2, y2;
    double xplus() const { return 0.5 * (x1 + x2); }
    double yplus() const { return 0.5 * (y1 + y2); }
};

// Discrete sampler over the object-derived r+ density, shared by the
// standalone sampling ops and the frame renderer.  Amplitude mode maps object
// cells through point inversion and f'/f magnification onto the sensor;
// interference mode places the object grid directly in the r+ plane and
// weights cells by the fringe density.
class PairSampler {
public:
    PairSampler(const ObjectSpec& obj, const OpticalConfig& cfg, const PairSourceConfig& src);

    // Pair rate multiplier: mean fringe density over the no-interference
    // baseline.  1 in amplitude mode; oscillates with theta in interference
    // mode (the physical flux does too).
    double flux_factor() const { return flux_; }

    // Draws r+ (sensor px), then r- ~ N(0, minus_sigma)^2, returns the pair.
    PhotonPair draw(RngStream& rng) const;

    int sensor_nx() const { return nx_; }
    int sensor_ny() const { return ny_; }

private:
    std::vector<double> cdf_; // over object cells, row-major
    int cells_x_ = 0, cells_y_ = 0;
    double cell_to_px_ = 0;  // sensor px per object cell
    double offset_x_ = 0, offset_y_ = 0;
    double minus_sigma_ = 0;
    double flux_ = 1;
    int nx_ = 0, ny_ = 0;
};

struct PairSampleResult {
    std::vector<PhotonPair> pairs; // on-sensor pairs only
    uint64_t discarded = 0;        // pairs with either photon off-sensor
};

// n pair draws from the amplitude-mode density; off-sensor pairs (either
// photon rounding outside the sensor) are dropped and counted.
PairSampleResult sample_pairs(const ObjectSpec& obj, const OpticalConfig& cfg,
                              const PairSourceConfig& src, uint64_t seed, uint64_t n);

// Interference-mode counterpart (fringe density, Eq. above).
PairSampleResult sample_interference_pairs(const ObjectSpec& obj, const OpticalConfig& cfg,
                                           const PairSourceConfig& src, uint64_t seed, uint64_t n);

// Distributes pre-sampled pairs over M frames (Poisson counts of mean
// mean_pairs_per_frame per frame) and applies the camera model.
FrameStack render_frames(const std::vector<PhotonPair>& pairs, const PairSourceConfig& src,
                         const CameraModel& camera, const OpticalConfig& cfg, uint32_t m_frames,
                         uint64_t seed, Dtype dtype = Dtype::f32);

// Fused per-frame pipeline: every frame draws its own pair count and pairs
// from a stream derived from (seed, frame index), so any frame can be
// regenerated independently and the stack is identical at any worker count.
struct SimParams {
    ObjectSpec object;
    OpticalConfig optics;
    PairSourceConfig source;
    CameraModel camera;
    uint32_t frames = 0;
    uint64_t seed = 0;
    Dtype dtype = Dtype::f32;
};

struct SimStats {
    uint64_t attempted_pairs = 0;
    uint64_t kept_pairs = 0;
    uint64_t discarded_pairs = 0;
};

FrameStack simulate_stack(const SimParams& params, int workers = 1, SimStats* stats = nullptr);

// Lazy frame source: regenerates frame m on fetch, byte-identical to the
// frames simulate_stack(params) would materialize.  Lets the estimator stream
// stacks far larger than memory.
class SimulatedSource : public FrameSource {
public:
    explicit SimulatedSource(const SimParams& params);
    uint32_t frame_count() const override { return params_.frames; }
    int nx() const override { return params_.optics.sensor_nx; }
    int ny() const override { return params_.optics.sensor_ny; }
    void fetch(uint32_t m, double* out) const override;

private:
    SimParams params_;
    PairSampler sampler_;
};

} // namespace corrcam
