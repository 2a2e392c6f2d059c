#pragma once
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "corrcam/errors.hpp"

namespace corrcam {

// Dense row-major 2D buffer.  (ix, iy) = (column, row); data()[iy*nx + ix].
template <class T>
class Image2D {
public:
    Image2D() = default;
    Image2D(int nx, int ny, T fill = T{}) : nx_(nx), ny_(ny) {
        if (nx <= 0 || ny <= 0)
            throw ConfigError("Image2D: dimensions must be positive");
        v_.assign(static_cast<size_t>(nx) * ny, fill);
    }

    int nx() const { return nx_; }
    int ny() const { return ny_; }
    size_t size() const { return v_.size(); }
    bool empty() const { return v_.empty(); }

    T& operator()(int ix, int iy) { return v_[static_cast<size_t>(iy) * nx_ + ix]; }
    const T& operator()(int ix, int iy) const { return v_[static_cast<size_t>(iy) * nx_ + ix]; }

    bool contains(int ix, int iy) const {
        return ix >= 0 && ix < nx_ && iy >= 0 && iy < ny_;
    }

    T* data() { return v_.data(); }
    const T* data() const { return v_.data(); }
    std::vector<T>& raw() { return v_; }
    const std::vector<T>& raw() const { return v_; }

    void fill(T value) { std::fill(v_.begin(), v_.end(), value); }

    bool same_shape(const Image2D& o) const { return nx_ == o.nx_ && ny_ == o.ny_; }

private:
    int nx_ = 0, ny_ = 0;
    std::vector<T> v_;
};

// Centered pixel coordinate: index i on an n-point grid maps to i - (n-1)/2,
// in pixel units.  Even n puts the origin between the two middle samples.
inline double centered_coord(int i, int n) { return i - 0.5 * (n - 1); }

template <class T>
double image_max(const Image2D<T>& im) {
    double m = -HUGE_VAL;
    for (const auto& v : im.raw()) m = std::max(m, static_cast<double>(v));
    return m;
}

template <class T>
double image_min(const Image2D<T>& im) {
    double m = HUGE_VAL;
    for (const auto& v : im.raw()) m = std::min(m, static_cast<double>(v));
    return m;
}

template <class T>
double image_sum(const Image2D<T>& im) {
    double s = 0;
    for (const auto& v : im.raw()) s += static_cast<double>(v);
    return s;
}

// Zero-mean normalized cross-correlation of two same-shape maps; returns 0 if
// either side is constant.  Used both as analysis output and as test metric.
double ncc(const Image2D<double>& a, const Image2D<double>& b);

} // namespace corrcam
