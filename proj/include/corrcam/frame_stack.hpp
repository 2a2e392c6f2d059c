#pragma once
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "corrcam/errors.hpp"

namespace corrcam {

enum class Dtype : uint32_t { u16 = 0, f32 = 1 };

inline const char* dtype_name(Dtype d) { return d == Dtype::u16 ? "u16" : "f32"; }
Dtype dtype_from_name(const std::string& s);

// A stack of M same-shape camera frames, frame-major, each frame row-major.
// Samples live as float regardless of on-disk dtype; u16 stacks hold exact
// integral values so the round trip is lossless.
struct FrameStack {
    int nx = 0, ny = 0;
    uint32_t frames = 0;
    Dtype dtype = Dtype::f32;
    std::vector<float> data;
    std::vector<std::pair<std::string, std::string>> metadata;

    size_t frame_size() const { return static_cast<size_t>(nx) * ny; }

    std::span<const float> frame(uint32_t m) const {
        if (m >= frames) throw ConfigError("frame index out of range");
        return {data.data() + static_cast<size_t>(m) * frame_size(), frame_size()};
    }
    std::span<float> frame(uint32_t m) {
        if (m >= frames) throw ConfigError("frame index out of range");
        return {data.data() + static_cast<size_t>(m) * frame_size(), frame_size()};
    }

    void validate() const {
        if (nx <= 0 || ny <= 0) throw ConfigError("FrameStack: dimensions must be positive");
        if (frames == 0) throw ConfigError("FrameStack: at least one frame required");
        if (data.size() != frame_size() * frames)
            throw ConfigError("FrameStack: data size does not match dimensions");
    }
};

} // namespace corrcam
