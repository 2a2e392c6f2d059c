#pragma once
#include <cstdint>
#include <string>

#include "corrcam/image.hpp"

namespace corrcam {

// Binary netpbm P5.  16-bit samples are big-endian per the format; maxval is
// fixed at 65535 (write) and accepted in (255, 65535] (read).
void write_pgm16(const std::string& path, const Image2D<uint16_t>& im);
Image2D<uint16_t> read_pgm16(const std::string& path);

void write_pgm8(const std::string& path, const Image2D<uint8_t>& im);
Image2D<uint8_t> read_pgm8(const std::string& path);

} // namespace corrcam
