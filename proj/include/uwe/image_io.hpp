#pragma once

#include <string>

#include "uwe/tensor.hpp"

namespace uwe {

// 8-bit RGB image I/O. Binary PPM (P6, maxval 255) is implemented in-repo and
// is the format the test suite relies on; PNG is available when built with
// libpng. Pixel mapping: byte/255 on load, round(clamp01(v)*255) on save.

bool png_supported();

/// Sniffs the file content ("P6" vs the PNG signature). Returns a 1x3xHxW tensor.
Tensor load_image(const std::string& path);

/// Format chosen by extension: .png -> PNG, .ppm -> PPM.
void save_image(const Tensor& image, const std::string& path);

Tensor load_ppm(const std::string& path);
void save_ppm(const Tensor& image, const std::string& path);

Tensor load_png(const std::string& path);
void save_png(const Tensor& image, const std::string& path);

/// round(clamp01(v)*255) for one float.
unsigned char quantize_u8(float v);

} // namespace uwe
