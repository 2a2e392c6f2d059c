#include <fftw3.h>

#include <cstring>
#include <future>
#include <mutex>

#include "corrcam/errors.hpp"
#include "corrcam/estimator.hpp"

// FFT fast path: Gamma+ = (1/M) sum_m (I_m * I_m) - (1/(M-1)) sum (I_m * I_{m+1})
// with * the full linear convolution, realized by zero-padding each frame to a
// power of two >= 2N-1 so nothing wraps.  Everything is accumulated in the
// frequency domain (one forward transform per frame, a single inverse at the
// end), streaming with O(padded frame) memory.
//
// Determinism: FFTW plans are created once with FFTW_ESTIMATE (deterministic
// plan choice, no runtime tuning) and executed with the new-array interface.
// Frames are grouped into fixed 256-frame blocks whose partial sums are folded
// strictly in block order, so the result is bitwise identical regardless of
// the worker count.  Plan creation is serialized (FFTW requirement); execution
// is thread-safe.

namespace corrcam {

namespace {

constexpr uint32_t kBlock = 256;

int next_pow2(int n) {
    int p = 1;
    while (p < n) p <<= 1;
    return p;
}

std::mutex& plan_mutex() {
    static std::mutex m;
    return m;
}

struct PlanPair {
    fftw_plan fwd = nullptr, inv = nullptr;
    int px = 0, py = 0;
    size_t real_n() const { return static_cast<size_t>(px) * py; }
    size_t cplx_n() const { return static_cast<size_t>(py) * (px / 2 + 1); }
};

// Per-thread workspace: padded real frame, two spectra (current + previous),
// and the block accumulators.  The diag_* images collect the same-pixel
// products the projection must exclude (see estimator.hpp); they are
// subtracted from the convolution result at the end.
struct Workspace {
    double* real = nullptr;
    fftw_complex* spec_a = nullptr;
    fftw_complex* spec_b = nullptr;
    std::vector<double> frame;
    std::vector<double> frame_prev;
    std::vector<double> acc_self;  // interleaved re,im
    std::vector<double> acc_cross;
    std::vector<double> diag_self;   // sum_m I_m(p)^2
    std::vector<double> diag_cross;  // sum_m I_m(p) I_{m+1}(p)

    Workspace(const PlanPair& plan, size_t npix) {
        real = fftw_alloc_real(plan.real_n());
        spec_a = fftw_alloc_complex(plan.cplx_n());
        spec_b = fftw_alloc_complex(plan.cplx_n());
        if (!real || !spec_a || !spec_b) throw CapacityError("fft estimator: allocation failed");
        frame.resize(npix);
        frame_prev.resize(npix);
        acc_self.assign(2 * plan.cplx_n(), 0.0);
        acc_cross.assign(2 * plan.cplx_n(), 0.0);
        diag_self.assign(npix, 0.0);
        diag_cross.assign(npix, 0.0);
    }
    ~Workspace() {
        fftw_free(real);
        fftw_free(spec_a);
        fftw_free(spec_b);
    }
    Workspace(const Workspace&) = delete;
    Workspace& operator=(const Workspace&) = delete;
};

void load_frame(const FrameSource& source, uint32_t m, const PlanPair& plan, Workspace& ws,
                fftw_complex* out_spec) {
    source.fetch(m, ws.frame.data());
    std::memset(ws.real, 0, plan.real_n() * sizeof(double));
    const int nx = source.nx(), ny = source.ny();
    for (int j = 0; j < ny; ++j)
        std::memcpy(ws.real + static_cast<size_t>(j) * plan.px,
                    ws.frame.data() + static_cast<size_t>(j) * nx, nx * sizeof(double));
    fftw_execute_dft_r2c(plan.fwd, ws.real, out_spec);
}

// Accumulates one block [lo, hi) plus its boundary pair (hi-1, hi) when a
// following frame exists; every block is self-contained so the fold is a
// plain ordered sum.
void run_block(const FrameSource& source, const PlanPair& plan, Workspace& ws, uint32_t lo,
               uint32_t hi, uint32_t m_total) {
    const size_t nc = plan.cplx_n();
    const size_t npix = ws.frame.size();
    fftw_complex* cur = ws.spec_a;
    fftw_complex* prev = ws.spec_b;
    for (uint32_t m = lo; m < hi; ++m) {
        load_frame(source, m, plan, ws, cur);
        for (size_t i = 0; i < nc; ++i) {
            const double ar = cur[i][0], ai = cur[i][1];
            ws.acc_self[2 * i] += ar * ar - ai * ai;
            ws.acc_self[2 * i + 1] += 2.0 * ar * ai;
        }
        for (size_t p = 0; p < npix; ++p) ws.diag_self[p] += ws.frame[p] * ws.frame[p];
        if (m > lo) {
            for (size_t i = 0; i < nc; ++i) {
                const double ar = prev[i][0], ai = prev[i][1];
                const double br = cur[i][0], bi = cur[i][1];
                ws.acc_cross[2 * i] += ar * br - ai * bi;
                ws.acc_cross[2 * i + 1] += ar * bi + ai * br;
            }
            for (size_t p = 0; p < npix; ++p) ws.diag_cross[p] += ws.frame_prev[p] * ws.frame[p];
        }
        std::swap(cur, prev);
        std::swap(ws.frame, ws.frame_prev);
    }
    if (hi < m_total) {
        // cross pair spanning the block boundary: (hi-1, hi)
        load_frame(source, hi, plan, ws, cur);
        for (size_t i = 0; i < nc; ++i) {
            const double ar = prev[i][0], ai = prev[i][1];
            const double br = cur[i][0], bi = cur[i][1];
            ws.acc_cross[2 * i] += ar * br - ai * bi;
            ws.acc_cross[2 * i + 1] += ar * bi + ai * br;
        }
        for (size_t p = 0; p < npix; ++p) ws.diag_cross[p] += ws.frame_prev[p] * ws.frame[p];
    }
}

} // namespace

CorrelationImage correlation_image_fft(const FrameSource& source, int workers) {
    if (source.nx() <= 0 || source.ny() <= 0) throw ConfigError("estimator: empty frames");
    const uint32_t m_total = source.frame_count();
    if (m_total < 2) throw ConfigError("estimator: need at least 2 frames");

    const int nx = source.nx(), ny = source.ny();
    const int bx = 2 * nx - 1, by = 2 * ny - 1;
    PlanPair plan;
    plan.px = next_pow2(bx);
    plan.py = next_pow2(by);

    double* master_real = fftw_alloc_real(plan.real_n());
    fftw_complex* master_spec = fftw_alloc_complex(plan.cplx_n());
    if (!master_real || !master_spec) throw CapacityError("fft estimator: allocation failed");
    {
        std::lock_guard<std::mutex> lock(plan_mutex());
        plan.fwd = fftw_plan_dft_r2c_2d(plan.py, plan.px, master_real, master_spec, FFTW_ESTIMATE);
        plan.inv = fftw_plan_dft_c2r_2d(plan.py, plan.px, master_spec, master_real, FFTW_ESTIMATE);
    }
    if (!plan.fwd || !plan.inv) throw CapacityError("fft estimator: planning failed");

    const size_t nc = plan.cplx_n();
    const size_t npix = static_cast<size_t>(nx) * ny;
    std::vector<double> total_self(2 * nc, 0.0), total_cross(2 * nc, 0.0);
    std::vector<double> total_dself(npix, 0.0), total_dcross(npix, 0.0);
    const uint32_t n_blocks = (m_total + kBlock - 1) / kBlock;
    const int w = std::max(1, workers);

    auto block_task = [&](uint32_t b) {
        auto ws = std::make_unique<Workspace>(plan, npix);
        const uint32_t lo = b * kBlock, hi = std::min(m_total, lo + kBlock);
        run_block(source, plan, *ws, lo, hi, m_total);
        return ws;
    };

    for (uint32_t b0 = 0; b0 < n_blocks; b0 += w) {
        std::vector<std::future<std::unique_ptr<Workspace>>> futs;
        for (uint32_t b = b0; b < std::min(n_blocks, b0 + w); ++b)
            futs.push_back(std::async(w == 1 ? std::launch::deferred : std::launch::async,
                                      block_task, b));
        for (auto& f : futs) {
            auto ws = f.get();
            for (size_t i = 0; i < 2 * nc; ++i) {
                total_self[i] += ws->acc_self[i];
                total_cross[i] += ws->acc_cross[i];
            }
            for (size_t p = 0; p < npix; ++p) {
                total_dself[p] += ws->diag_self[p];
                total_dcross[p] += ws->diag_cross[p];
            }
        }
    }

    // combine in the frequency domain, then one inverse transform
    const double sm = 1.0 / m_total, sc = 1.0 / (m_total - 1);
    const double inv_norm = 1.0 / (static_cast<double>(plan.px) * plan.py);
    for (size_t i = 0; i < nc; ++i) {
        master_spec[i][0] = (total_self[2 * i] * sm - total_cross[2 * i] * sc) * inv_norm;
        master_spec[i][1] = (total_self[2 * i + 1] * sm - total_cross[2 * i + 1] * sc) * inv_norm;
    }
    fftw_execute_dft_c2r(plan.inv, master_spec, master_real);

    CorrelationImage out;
    out.values = Image2D<double>(bx, by);
    out.frames_used = m_total;
    for (int l = 0; l < by; ++l)
        for (int k = 0; k < bx; ++k)
            out.values(k, l) = master_real[static_cast<size_t>(l) * plan.px + k];

    // remove the same-pixel products the convolution picked up
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const size_t p = static_cast<size_t>(j) * nx + i;
            out.values(2 * i, 2 * j) -= total_dself[p] * sm - total_dcross[p] * sc;
        }

    {
        std::lock_guard<std::mutex> lock(plan_mutex());
        fftw_destroy_plan(plan.fwd);
        fftw_destroy_plan(plan.inv);
    }
    fftw_free(master_real);
    fftw_free(master_spec);
    return out;
}

} // namespace corrcam
