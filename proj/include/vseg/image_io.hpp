#pragma once

#include <string>

#include "vseg/image.hpp"

namespace vseg {

// Supported formats: PNG and binary PPM/PGM (P5/P6, 8-bit). Grayscale
// sources are replicated to 3 channels.
FundusImage load_image(const std::string& path);

// First-channel threshold: pixel true iff value > threshold.
BinaryMask load_mask(const std::string& path, int threshold = 127);

void save_image(const FundusImage& img, const std::string& path);
void save_gray_png(const GrayImage& img, const std::string& path);
void save_gray8_png(const std::vector<std::uint8_t>& pixels, int width, int height,
                    const std::string& path);

// Class maps travel as single-channel PNG with levels {0,60,120,180,240}.
void save_class_map_png(const ClassMap& map, const std::string& path);
ClassMap load_class_map_png(const std::string& path);

}  // namespace vseg
