#pragma once
#include <string>

#include "corrcam/correlation.hpp"
#include "corrcam/frame_stack.hpp"

namespace corrcam {

// Binary frame-stack container:
//   bytes  0..15   magic "CORRCAMFRAMES" + three NULs
//   u32 LE         version (currently 1)
//   u32 LE         frame count M
//   u32 LE         Nx, Ny
//   u32 LE         dtype (0 = u16, 1 = f32)
//   payload        M frames, frame-major, rows of Nx samples (LE)
//   u32 LE         metadata byte length
//   bytes          UTF-8 "key = value\n" lines
// Total size is checked exactly on read; any mismatch is a format error.
void write_frame_stack(const std::string& path, const FrameStack& stack);
FrameStack read_frame_stack(const std::string& path);

// Correlation maps reuse the same container with M = 1 and dtype f32; the
// frame count used for estimation and the pixel pitch ride in the metadata.
void write_correlation_image(const std::string& path, const CorrelationImage& im);
CorrelationImage read_correlation_image(const std::string& path);

// Reads only the header + metadata (no payload) — cheap inspection.
struct FrameFileInfo {
    int nx = 0, ny = 0;
    uint32_t frames = 0;
    Dtype dtype = Dtype::f32;
    std::vector<std::pair<std::string, std::string>> metadata;
};
FrameFileInfo read_frame_stack_info(const std::string& path);

} // namespace corrcam
