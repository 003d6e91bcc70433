#pragma once

#include <cstdint>
#include <filesystem>

#include "nighthaze/image.hpp"

namespace nighthaze {

// PNG (8/16-bit gray, gray+alpha, RGB, RGBA, palette) and binary PGM/PPM
// (P5/P6, maxval up to 65535). Intensities map linearly to [0, 1]; alpha is
// dropped. Throws IoError on unreadable or undecodable files.
PlanarImage read_image(const std::filesystem::path& path);

// Format chosen by extension: .png, .pgm, .ppm (.pnm picks by channel count).
// Values are clamped to [0, 1] and quantized with round-half-up.
void write_image(const std::filesystem::path& path, const PlanarImage& img, int bit_depth = 8);

// floor(v * maxval + 0.5) after clamping v to [0, 1].
std::uint32_t quantize(double v, std::uint32_t maxval) noexcept;

}  // namespace nighthaze
