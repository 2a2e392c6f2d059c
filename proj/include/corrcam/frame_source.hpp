#pragma once
#include <cstdint>
#include <memory>
#include <string>

#include "corrcam/frame_stack.hpp"

namespace corrcam {

// Abstract random-access frame supplier.  fetch must be safe for concurrent
// calls with distinct (or equal) m — estimator workers pull frames in
// parallel.  Implementations exist for in-memory stacks, on-disk containers
// (pread, never loading the stack), and lazy re-simulation.
struct FrameSource {
    virtual ~FrameSource() = default;
    virtual uint32_t frame_count() const = 0;
    virtual int nx() const = 0;
    virtual int ny() const = 0;
    // Writes nx()*ny() samples (row-major) of frame m into out.
    virtual void fetch(uint32_t m, double* out) const = 0;
};

class MemoryStackSource : public FrameSource {
public:
    explicit MemoryStackSource(const FrameStack& stack) : stack_(stack) { stack.validate(); }
    uint32_t frame_count() const override { return stack_.frames; }
    int nx() const override { return stack_.nx; }
    int ny() const override { return stack_.ny; }
    void fetch(uint32_t m, double* out) const override {
        auto f = stack_.frame(m);
        for (size_t i = 0; i < f.size(); ++i) out[i] = f[i];
    }

private:
    const FrameStack& stack_;
};

// Streams frames from the binary container via positioned reads; O(frame)
// memory no matter the stack size.
class FileStackSource : public FrameSource {
public:
    explicit FileStackSource(const std::string& path);
    ~FileStackSource() override;
    FileStackSource(const FileStackSource&) = delete;
    FileStackSource& operator=(const FileStackSource&) = delete;

    uint32_t frame_count() const override { return frames_; }
    int nx() const override { return nx_; }
    int ny() const override { return ny_; }
    void fetch(uint32_t m, double* out) const override;

private:
    int fd_ = -1;
    std::string path_;
    int nx_ = 0, ny_ = 0;
    uint32_t frames_ = 0;
    Dtype dtype_ = Dtype::f32;
};

// Binarizes another source on the fly: out = (raw > threshold) ? 1 : 0.
class ThresholdedSource : public FrameSource {
public:
    ThresholdedSource(const FrameSource& inner, double threshold)
        : inner_(inner), threshold_(threshold) {}
    uint32_t frame_count() const override { return inner_.frame_count(); }
    int nx() const override { return inner_.nx(); }
    int ny() const override { return inner_.ny(); }
    void fetch(uint32_t m, double* out) const override {
        inner_.fetch(m, out);
        size_t n = static_cast<size_t>(nx()) * ny();
        for (size_t i = 0; i < n; ++i) out[i] = out[i] > threshold_ ? 1.0 : 0.0;
    }

private:
    const FrameSource& inner_;
    double threshold_;
};

} // namespace corrcam
