#include "corrcam/pairgen.hpp"

#include <cmath>
#include <complex>
#include <cstdio>
#include <future>

namespace corrcam {

namespace {

// RNG stream domains; frame streams use the frame index so any frame can be
// regenerated in isolation.
constexpr uint64_t kDomainSample = 1;
constexpr uint64_t kDomainFrame = 2;

bool on_sensor(double x, double y, int nx, int ny) {
    long px = std::lround(x), py = std::lround(y);
    return px >= 0 && px < nx && py >= 0 && py < ny;
}

} // namespace

PairSampler::PairSampler(const ObjectSpec& obj, const OpticalConfig& cfg,
                         const PairSourceConfig& src) {
    obj.validate();
    cfg.validate();
    src.validate();
    nx_ = cfg.sensor_nx;
    ny_ = cfg.sensor_ny;
    minus_sigma_ = src.minus_sigma;
    cells_x_ = obj.amplitude.nx();
    cells_y_ = obj.amplitude.ny();

    if (src.mode == SourceMode::amplitude) {
        // r+ = -(f'/f) * rho: inversion through the axis plus magnification.
        cell_to_px_ = -(cfg.f_prime / cfg.f) * obj.pixel_size / cfg.pitch;
    } else {
        // Eq. 2 geometry: the fringe density lives directly in the r+ plane.
        cell_to_px_ = obj.pixel_size / cfg.pitch;
    }
    offset_x_ = 0.5 * (nx_ - 1);
    offset_y_ = 0.5 * (ny_ - 1);

    cdf_.resize(static_cast<size_t>(cells_x_) * cells_y_);
    double total = 0, baseline = 0;
    const std::complex<double> ref =
        src.mode == SourceMode::interference
            ? std::polar(src.reference_amplitude, 2.0 * src.theta - src.instrument_phase)
            : std::complex<double>(0, 0);
    for (int v = 0; v < cells_y_; ++v)
        for (int u = 0; u < cells_x_; ++u) {
            double w;
            if (src.mode == SourceMode::amplitude) {
                double a = obj.amplitude(u, v);
                w = a * a;
                baseline += w;
            } else {
                w = std::norm(obj.t(u, v) + ref);
                double a = obj.amplitude(u, v);
                baseline += a * a + src.reference_amplitude * src.reference_amplitude;
            }
            total += w;
            cdf_[static_cast<size_t>(v) * cells_x_ + u] = total;
        }
    if (!(total > 0))
        throw ConfigError(src.mode == SourceMode::interference
                              ? "interference density vanishes everywhere (perfect destructive "
                                "interference); nothing to sample"
                              : "object intensity is identically zero; nothing to sample");
    flux_ = src.mode == SourceMode::interference ? total / baseline : 1.0;
}

PhotonPair PairSampler::draw(RngStream& rng) const {
    // Fixed draw order per pair: cell, x-jitter, y-jitter, two r- normals.
    double u = rng.uniform() * cdf_.back();
    size_t lo = 0, hi = cdf_.size() - 1;
    while (lo < hi) {
        size_t mid = (lo + hi) / 2;
        if (cdf_[mid] <= u)
            lo = mid + 1;
        else
            hi = mid;
    }
    int cu = static_cast<int>(lo % cells_x_);
    int cv = static_cast<int>(lo / cells_x_);

    double ox = (centered_coord(cu, cells_x_) + rng.jitter()) * cell_to_px_ + offset_x_;
    double oy = (centered_coord(cv, cells_y_) + rng.jitter()) * cell_to_px_ + offset_y_;
    double rx = minus_sigma_ * rng.normal();
    double ry = minus_sigma_ * rng.normal();
    return PhotonPair{ox + rx, oy + ry, ox - rx, oy - ry};
}

namespace {

PairSampleResult sample_impl(const ObjectSpec& obj, const OpticalConfig& cfg,
                             const PairSourceConfig& src, uint64_t seed, uint64_t n) {
    PairSampler sampler(obj, cfg, src);
    RngStream rng = RngStream::derive(seed, kDomainSample, 0);
    PairSampleResult out;
    out.pairs.reserve(n);
    for (uint64_t i = 0; i < n; ++i) {
        PhotonPair p = sampler.draw(rng);
        if (on_sensor(p.x1, p.y1, cfg.sensor_nx, cfg.sensor_ny) &&
            on_sensor(p.x2, p.y2, cfg.sensor_nx, cfg.sensor_ny))
            out.pairs.push_back(p);
        else
            ++out.discarded;
    }
    return out;
}

} // namespace

PairSampleResult sample_pairs(const ObjectSpec& obj, const OpticalConfig& cfg,
                              const PairSourceConfig& src, uint64_t seed, uint64_t n) {
    if (src.mode != SourceMode::amplitude)
        throw ConfigError("sample_pairs requires amplitude mode");
    return sample_impl(obj, cfg, src, seed, n);
}

PairSampleResult sample_interference_pairs(const ObjectSpec& obj, const OpticalConfig& cfg,
                                           const PairSourceConfig& src, uint64_t seed, uint64_t n) {
    if (src.mode != SourceMode::interference)
        throw ConfigError("sample_interference_pairs requires interference mode");
    return sample_impl(obj, cfg, src, seed, n);
}

namespace {

// Camera stages shared by both render paths.  Draw order is part of the
// format: pair deposits, then dark counts, then readout noise, then
// threshold/quantization.
struct FrameRenderer {
    const CameraModel& cam;
    int nx, ny;
    Dtype dtype;

    void deposit_pair(std::vector<double>& buf, const PhotonPair& p, RngStream& rng,
                      uint64_t& kept, uint64_t& discarded) const {
        if (!on_sensor(p.x1, p.y1, nx, ny) || !on_sensor(p.x2, p.y2, nx, ny)) {
            ++discarded;
            // burn the survival draws so the stream layout does not depend on
            // the sensor geometry
            rng.uniform();
            rng.uniform();
            return;
        }
        ++kept;
        deposit_photon(buf, p.x1, p.y1, rng);
        deposit_photon(buf, p.x2, p.y2, rng);
    }

    void deposit_photon(std::vector<double>& buf, double x, double y, RngStream& rng) const {
        if (rng.uniform() >= cam.quantum_efficiency) return;
        long px = std::lround(x), py = std::lround(y);
        buf[static_cast<size_t>(py) * nx + px] += event_gain(rng);
    }

    double event_gain(RngStream& rng) const {
        return cam.gain_mode == GainMode::stochastic ? rng.exponential(cam.gain) : cam.gain;
    }

    void add_noise(std::vector<double>& buf, RngStream& rng) const {
        const size_t npix = buf.size();
        if (cam.dark_rate > 0) {
            uint64_t nd = rng.poisson(cam.dark_rate * static_cast<double>(npix));
            for (uint64_t i = 0; i < nd; ++i) {
                size_t pix = static_cast<size_t>(rng.uniform() * npix);
                if (pix >= npix) pix = npix - 1;
                buf[pix] += event_gain(rng);
            }
        }
        if (cam.readout_sigma > 0)
            for (size_t i = 0; i < npix; ++i) buf[i] += cam.readout_sigma * rng.normal();
    }

    void quantize(const std::vector<double>& buf, float* out) const {
        const size_t npix = buf.size();
        if (cam.threshold) {
            double thr = *cam.threshold;
            for (size_t i = 0; i < npix; ++i) out[i] = buf[i] > thr ? 1.0f : 0.0f;
        } else if (dtype == Dtype::u16) {
            for (size_t i = 0; i < npix; ++i) {
                long v = std::lround(buf[i]);
                out[i] = static_cast<float>(v < 0 ? 0 : (v > 65535 ? 65535 : v));
            }
        } else {
            for (size_t i = 0; i < npix; ++i) out[i] = static_cast<float>(buf[i]);
        }
    }
};

} // namespace

FrameStack render_frames(const std::vector<PhotonPair>& pairs, const PairSourceConfig& src,
                         const CameraModel& camera, const OpticalConfig& cfg, uint32_t m_frames,
                         uint64_t seed, Dtype dtype) {
    src.validate();
    camera.validate();
    cfg.validate();
    if (m_frames < 2) throw ConfigError("render_frames: at least 2 frames required");

    FrameStack stack;
    stack.nx = cfg.sensor_nx;
    stack.ny = cfg.sensor_ny;
    stack.frames = m_frames;
    stack.dtype = dtype;
    stack.data.resize(stack.frame_size() * m_frames);

    FrameRenderer rend{camera, stack.nx, stack.ny, dtype};
    std::vector<double> buf(stack.frame_size());
    size_t next = 0;
    uint64_t kept = 0, discarded = 0;
    for (uint32_t m = 0; m < m_frames; ++m) {
        RngStream rng = RngStream::derive(seed, kDomainFrame, m);
        uint64_t k = rng.poisson(src.mean_pairs_per_frame);
        if (next + k > pairs.size())
            throw ConfigError("render_frames: pair list exhausted at frame " + std::to_string(m) +
                              " (" + std::to_string(pairs.size()) + " pairs supplied)");
        std::fill(buf.begin(), buf.end(), 0.0);
        for (uint64_t i = 0; i < k; ++i) rend.deposit_pair(buf, pairs[next++], rng, kept, discarded);
        rend.add_noise(buf, rng);
        rend.quantize(buf, stack.frame(m).data());
    }
    char tmp[32];
    std::snprintf(tmp, sizeof tmp, "%llu", static_cast<unsigned long long>(seed));
    stack.metadata.emplace_back("seed", tmp);
    stack.metadata.emplace_back("render", "from_pair_list");
    return stack;
}

namespace {

void simulate_one_frame(const SimParams& p, const PairSampler& sampler, const FrameRenderer& rend,
                        uint32_t m, std::vector<double>& buf, float* out, SimStats& stats) {
    RngStream rng = RngStream::derive(p.seed, kDomainFrame, m);
    const double mu_eff = p.source.mean_pairs_per_frame * sampler.flux_factor();
    uint64_t k = rng.poisson(mu_eff);
    std::fill(buf.begin(), buf.end(), 0.0);
    stats.attempted_pairs += k;
    for (uint64_t i = 0; i < k; ++i) {
        PhotonPair pair = sampler.draw(rng);
        rend.deposit_pair(buf, pair, rng, stats.kept_pairs, stats.discarded_pairs);
    }
    rend.add_noise(buf, rng);
    rend.quantize(buf, out);
}

} // namespace

FrameStack simulate_stack(const SimParams& p, int workers, SimStats* stats_out) {
    p.object.validate();
    p.optics.validate();
    p.source.validate();
    p.camera.validate();
    if (p.frames < 2) throw ConfigError("simulate_stack: at least 2 frames required");

    PairSampler sampler(p.object, p.optics, p.source);
    FrameStack stack;
    stack.nx = p.optics.sensor_nx;
    stack.ny = p.optics.sensor_ny;
    stack.frames = p.frames;
    stack.dtype = p.dtype;
    stack.data.resize(stack.frame_size() * p.frames);
    FrameRenderer rend{p.camera, stack.nx, stack.ny, p.dtype};

    const int w = std::max(1, workers);
    std::vector<SimStats> tallies(w);
    auto run_range = [&](int slot, uint32_t lo, uint32_t hi) {
        std::vector<double> buf(stack.frame_size());
        for (uint32_t m = lo; m < hi; ++m)
            simulate_one_frame(p, sampler, rend, m, buf, stack.frame(m).data(), tallies[slot]);
    };
    if (w == 1) {
        run_range(0, 0, p.frames);
    } else {
        std::vector<std::future<void>> futs;
        uint32_t per = (p.frames + w - 1) / w;
        for (int i = 0; i < w; ++i) {
            uint32_t lo = std::min<uint32_t>(i * per, p.frames);
            uint32_t hi = std::min<uint32_t>(lo + per, p.frames);
            futs.push_back(std::async(std::launch::async, run_range, i, lo, hi));
        }
        for (auto& f : futs) f.get();
    }
    SimStats stats;
    for (const auto& t : tallies) {
        stats.attempted_pairs += t.attempted_pairs;
        stats.kept_pairs += t.kept_pairs;
        stats.discarded_pairs += t.discarded_pairs;
    }
    if (stats_out) *stats_out = stats;

    auto add = [&](const std::string& k, const std::string& v) { stack.metadata.emplace_back(k, v); };
    char tmp[48];
    auto num = [&](double v) {
        std::snprintf(tmp, sizeof tmp, "%.17g", v);
        return std::string(tmp);
    };
    auto cnt = [&](uint64_t v) {
        std::snprintf(tmp, sizeof tmp, "%llu", static_cast<unsigned long long>(v));
        return std::string(tmp);
    };
    add("seed", cnt(p.seed));
    add("frames", cnt(p.frames));
    add("dtype", dtype_name(p.dtype));
    add("source.mode", p.source.mode == SourceMode::amplitude ? "amplitude" : "interference");
    add("source.mean_pairs_per_frame", num(p.source.mean_pairs_per_frame));
    add("source.minus_sigma", num(p.source.minus_sigma));
    add("source.theta", num(p.source.theta));
    add("source.reference_amplitude", num(p.source.reference_amplitude));
    add("source.instrument_phase", num(p.source.instrument_phase));
    add("camera.quantum_efficiency", num(p.camera.quantum_efficiency));
    add("camera.dark_rate", num(p.camera.dark_rate));
    add("camera.readout_sigma", num(p.camera.readout_sigma));
    add("camera.gain", num(p.camera.gain));
    add("camera.gain_mode", gain_mode_name(p.camera.gain_mode));
    if (p.camera.threshold) add("camera.threshold", num(*p.camera.threshold));
    add("optics.lambda_pump", num(p.optics.lambda_pump));
    add("optics.f", num(p.optics.f));
    add("optics.f_prime", num(p.optics.f_prime));
    add("optics.d", num(p.optics.dist_d()));
    add("optics.d_prime", num(p.optics.dist_d_prime()));
    add("optics.pitch", num(p.optics.pitch));
    add("object.pixel_size", num(p.object.pixel_size));
    add("object.nx", cnt(p.object.amplitude.nx()));
    add("object.ny", cnt(p.object.amplitude.ny()));
    add("stats.attempted_pairs", cnt(stats.attempted_pairs));
    add("stats.kept_pairs", cnt(stats.kept_pairs));
    add("stats.discarded_pairs", cnt(stats.discarded_pairs));
    return stack;
}

SimulatedSource::SimulatedSource(const SimParams& params)
    : params_(params), sampler_(params.object, params.optics, params.source) {
    params_.object.validate();
    params_.optics.validate();
    params_.source.validate();
    params_.camera.validate();
    if (params_.frames < 2) throw ConfigError("SimulatedSource: at least 2 frames required");
}

void SimulatedSource::fetch(uint32_t m, double* out) const {
    if (m >= params_.frames) throw ConfigError("frame index out of range");
    const size_t npix = static_cast<size_t>(nx()) * ny();
    std::vector<double> buf(npix);
    std::vector<float> quantized(npix);
    SimStats scratch;
    FrameRenderer rend{params_.camera, nx(), ny(), params_.dtype};
    simulate_one_frame(params_, sampler_, rend, m, buf, quantized.data(), scratch);
    for (size_t i = 0; i < npix; ++i) out[i] = quantized[i];
}

} // namespace corrcam
