#pragma once
#include <string>

#include "corrcam/object.hpp"

namespace corrcam {

// Object on disk = three files sharing a base path:
//   <base>.pgm        16-bit P5 amplitude, quantized against amplitude_scale
//   <base>.phase.csv  phase in radians, same shape, full precision
//   <base>.cfg        sidecar: pixel_size, amplitude_scale, nx, ny
void save_object(const std::string& base, const ObjectSpec& obj);
ObjectSpec load_object(const std::string& base);

} // namespace corrcam
