#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace shadow {

/// Normalized 2-D scalar field in [0,1], row-major.
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<float> data;

    GrayImage() = default;
    GrayImage(int w, int h, float fill = 0.f)
        : width(w), height(h), data(static_cast<size_t>(w) * h, fill) {}

    float& at(int x, int y) { return data[static_cast<size_t>(y) * width + x]; }
    float at(int x, int y) const { return data[static_cast<size_t>(y) * width + x]; }
    size_t size() const { return data.size(); }
};

/// Integer-labeled segmentation: 0 = background, 1..K = particles.
struct LabelMap {
    int width = 0;
    int height = 0;
    std::vector<uint32_t> labels;

    LabelMap() = default;
    LabelMap(int w, int h) : width(w), height(h), labels(static_cast<size_t>(w) * h, 0) {}

    uint32_t& at(int x, int y) { return labels[static_cast<size_t>(y) * width + x]; }
    uint32_t at(int x, int y) const { return labels[static_cast<size_t>(y) * width + x]; }
    size_t size() const { return labels.size(); }
};

struct BinaryMask {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> bits;

    BinaryMask() = default;
    BinaryMask(int w, int h) : width(w), height(h), bits(static_cast<size_t>(w) * h, 0) {}

    uint8_t& at(int x, int y) { return bits[static_cast<size_t>(y) * width + x]; }
    uint8_t at(int x, int y) const { return bits[static_cast<size_t>(y) * width + x]; }
    size_t size() const { return bits.size(); }
};

struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct ContractError : std::logic_error {
    using std::logic_error::logic_error;
};
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

}  // namespace shadow
