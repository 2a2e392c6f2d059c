#include "corrcam/estimator.hpp"

#include <future>

#include "corrcam/errors.hpp"

namespace corrcam {

namespace {

void check_source(const FrameSource& source, uint32_t min_frames) {
    if (source.nx() <= 0 || source.ny() <= 0) throw ConfigError("estimator: empty frames");
    if (source.frame_count() < min_frames)
        throw ConfigError("estimator: need at least " + std::to_string(min_frames) + " frames");
}

} // namespace

Image2D<double> intensity_image(const FrameSource& source, int workers) {
    check_source(source, 1);
    const uint32_t m_total = source.frame_count();
    const size_t npix = static_cast<size_t>(source.nx()) * source.ny();

    // Fixed-size blocks summed in index order: totals are independent of the
    // worker count.
    constexpr uint32_t kBlock = 256;
    const uint32_t n_blocks = (m_total + kBlock - 1) / kBlock;
    auto block_sum = [&](uint32_t b) {
        std::vector<double> acc(npix, 0.0), frame(npix);
        const uint32_t lo = b * kBlock, hi = std::min(m_total, lo + kBlock);
        for (uint32_t m = lo; m < hi; ++m) {
            source.fetch(m, frame.data());
            for (size_t i = 0; i < npix; ++i) acc[i] += frame[i];
        }
        return acc;
    };

    std::vector<double> total(npix, 0.0);
    const int w = std::max(1, workers);
    for (uint32_t b0 = 0; b0 < n_blocks; b0 += w) {
        std::vector<std::future<std::vector<double>>> futs;
        for (uint32_t b = b0; b < std::min(n_blocks, b0 + w); ++b)
            futs.push_back(std::async(w == 1 ? std::launch::deferred : std::launch::async,
                                      block_sum, b));
        for (auto& f : futs) {
            std::vector<double> acc = f.get();
            for (size_t i = 0; i < npix; ++i) total[i] += acc[i];
        }
    }
    Image2D<double> out(source.nx(), source.ny());
    for (size_t i = 0; i < npix; ++i) out.raw()[i] = total[i] / m_total;
    return out;
}

G2Volume g2_volume(const FrameSource& source, const Roi& roi, size_t memory_budget) {
    check_source(source, 2);
    if (roi.nx <= 0 || roi.ny <= 0 || roi.x0 < 0 || roi.y0 < 0 ||
        roi.x0 + roi.nx > source.nx() || roi.y0 + roi.ny > source.ny())
        throw ConfigError("g2_volume: roi outside the sensor");
    const size_t np = static_cast<size_t>(roi.nx) * roi.ny;
    const size_t need = np * np * sizeof(double);
    if (need > memory_budget)
        throw CapacityError("g2_volume: roi needs " + std::to_string(need) +
                            " bytes, budget is " + std::to_string(memory_budget));

    const uint32_t m_total = source.frame_count();
    std::vector<double> self(np * np, 0.0), cross(np * np, 0.0);
    const size_t npix = static_cast<size_t>(source.nx()) * source.ny();
    std::vector<double> cur(npix), prev(npix), rcur(np), rprev(np);

    auto extract = [&](const std::vector<double>& frame, std::vector<double>& r) {
        size_t idx = 0;
        for (int j = 0; j < roi.ny; ++j)
            for (int i = 0; i < roi.nx; ++i)
                r[idx++] = frame[static_cast<size_t>(roi.y0 + j) * source.nx() + roi.x0 + i];
    };

    for (uint32_t m = 0; m < m_total; ++m) {
        source.fetch(m, cur.data());
        extract(cur, rcur);
        for (size_t a = 0; a < np; ++a) {
            const double va = rcur[a];
            if (va != 0.0)
                for (size_t b = 0; b < np; ++b) self[a * np + b] += va * rcur[b];
        }
        if (m > 0) {
            // accidental term: frame m-1 in the (i,j) slot, frame m in (k,l)
            for (size_t a = 0; a < np; ++a) {
                const double va = rprev[a];
                if (va != 0.0)
                    for (size_t b = 0; b < np; ++b) cross[a * np + b] += va * rcur[b];
            }
        }
        std::swap(rprev, rcur);
    }

    G2Volume out;
    out.roi = roi;
    out.values.resize(np * np);
    const double sm = 1.0 / m_total, sc = 1.0 / (m_total - 1);
    for (size_t i = 0; i < np * np; ++i) out.values[i] = self[i] * sm - cross[i] * sc;
    return out;
}

CorrelationImage correlation_image_direct(const FrameSource& source) {
    check_source(source, 2);
    const int nx = source.nx(), ny = source.ny();
    const int bx = 2 * nx - 1, by = 2 * ny - 1;
    const uint32_t m_total = source.frame_count();
    const size_t npix = static_cast<size_t>(nx) * ny;

    std::vector<double> self(static_cast<size_t>(bx) * by, 0.0);
    std::vector<double> cross(static_cast<size_t>(bx) * by, 0.0);
    std::vector<double> cur(npix), prev(npix);

    // Gamma+(k,l) = sum over pixel pairs with i1+i2 = k, j1+j2 = l, i.e.
    // per-frame (auto)convolutions -- except the same-pixel pair r1 = r2.
    // A photon-counting camera cannot register two photons in one pixel, so
    // the r1 = r2 product carries per-pixel variance (gain + readout noise),
    // not coincidence signal; including it would print a noise pedestal onto
    // the even-even sum bins.  Skipping empty pixels keeps the reference path
    // usable on sparse stacks.
    auto accumulate = [&](const std::vector<double>& fa, const std::vector<double>& fb,
                          std::vector<double>& acc) {
        for (int j1 = 0; j1 < ny; ++j1)
            for (int i1 = 0; i1 < nx; ++i1) {
                const double va = fa[static_cast<size_t>(j1) * nx + i1];
                if (va == 0.0) continue;
                for (int j2 = 0; j2 < ny; ++j2) {
                    double* row = &acc[static_cast<size_t>(j1 + j2) * bx + i1];
                    const double* fb_row = &fb[static_cast<size_t>(j2) * nx];
                    for (int i2 = 0; i2 < nx; ++i2) {
                        if (i2 == i1 && j2 == j1) continue; // same pixel
                        row[i2] += va * fb_row[i2];
                    }
                }
            }
    };

    for (uint32_t m = 0; m < m_total; ++m) {
        source.fetch(m, cur.data());
        accumulate(cur, cur, self);
        if (m > 0) accumulate(prev, cur, cross);
        std::swap(prev, cur);
    }

    CorrelationImage out;
    out.values = Image2D<double>(bx, by);
    out.frames_used = m_total;
    const double sm = 1.0 / m_total, sc = 1.0 / (m_total - 1);
    for (size_t i = 0; i < out.values.size(); ++i)
        out.values.raw()[i] = self[i] * sm - cross[i] * sc;
    return out;
}

} // namespace corrcam
