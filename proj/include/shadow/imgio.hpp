#pragma once
// Bit-exact P5 graymap I/O and intensity-distribution preprocessing.
// Intensities: 8-bit, maxval 255. Label maps: 16-bit, maxval 65535, big-endian.

#include <string>

#include "shadow/image.hpp"

namespace shadow::imgio {

GrayImage load_image(const std::string& path);
void save_image(const GrayImage& img, const std::string& path);

LabelMap load_label_map(const std::string& path);
void save_label_map(const LabelMap& lm, const std::string& path);

/// Classic 256-bin histogram matching of img onto reference's distribution.
/// A constant source maps every pixel to the reference value at CDF level 0.5.
GrayImage match_intensity(const GrayImage& img, const GrayImage& reference);

/// round-half-up quantization used by all 8-bit writers
inline int quantize8(float v) { return static_cast<int>(v * 255.0f + 0.5f); }

}  // namespace shadow::imgio
