#pragma once

#include <string>

#include "memdeblur/image.hpp"

namespace memdeblur {

// Reads an 8-bit PNG, PGM (P2/P5) or PPM (P3/P6) file; intensities are
// mapped to [0,1] by dividing by 255. Format is chosen by extension, with a
// magic-byte fallback. Throws std::runtime_error on unreadable files or
// unsupported bit depths.
Image read_image(const std::string& path);

// Writes 8-bit PNG/PGM/PPM by extension; values are clamped to [0,1] and
// quantized to round(v*255).
void write_image(const Image& img, const std::string& path);

// Plain-text kernel format: first line "k", then k rows of k decimals.
Kernel read_kernel(const std::string& path);
void write_kernel(const Kernel& kernel, const std::string& path);

}  // namespace memdeblur
