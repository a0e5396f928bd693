#pragma once

#include "segkit/image.hpp"

#include <filesystem>

namespace segkit {

/// Decodes any PNG to 8-bit RGB. Throws LoadError naming the file.
ImageFrame read_rgb_png(std::filesystem::path const& path, std::string id = {});

/// Decodes a PNG as grayscale; any value >= 128 is foreground.
BinaryMask read_mask_png(std::filesystem::path const& path);

void write_rgb_png(std::filesystem::path const& path, ImageFrame const& frame);

/// Writes the mask as an 8-bit grayscale PNG with values 0/255.
void write_mask_png(std::filesystem::path const& path, BinaryMask const& mask);

} // namespace segkit
