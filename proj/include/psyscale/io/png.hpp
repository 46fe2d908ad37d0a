#pragma once

#include <filesystem>

#include "psyscale/stimuli/image.hpp"

namespace psyscale {

/// Decodes any PNG (gray, gray+alpha, palette, RGB, RGBA; 1-16 bit) into
/// three [0,1] planes. Alpha is ignored. Gray images fill all three planes.
/// Throws IoError if the file cannot be read, MalformedImage if it does not
/// decode.
RgbImage read_rgb_png(const std::filesystem::path& path);

/// Single-plane read: the channel average for colour files.
GrayImage read_gray_png(const std::filesystem::path& path);

/// Pixels whose channel average is >= 0.5 are object.
ObjectMask read_mask_png(const std::filesystem::path& path);

/// Writes a grayscale PNG of the given bit depth (8 or 16), atomically.
void write_gray_png(const std::filesystem::path& path, const GrayImage& img, int bit_depth = 16);

void write_mask_png(const std::filesystem::path& path, const ObjectMask& mask);

}  // namespace psyscale
