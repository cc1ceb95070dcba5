#pragma once
// Simplified conventional segmenter for the comparison arm: global Otsu
// threshold, hole filling, morphological opening, then distance-peak markers
// into the same marker-controlled watershed.

#include "shadow/image.hpp"
#include "shadow/segment.hpp"

namespace shadow::baseline {

struct BaselineConfig {
    int opening_radius = 1;
    double h_fraction = 0.3;  // marker-suppression depth fraction of each component's max distance

    void validate() const {
        if (opening_radius < 0) throw ConfigError("baseline: opening_radius must be >= 0");
        if (!(h_fraction > 0) || h_fraction >= 1) throw ConfigError("baseline: h_fraction in (0,1)");
    }
};

/// Between-class-variance maximizer over 256 bins. Bubbles are dark on a
/// bright background, so the mask selects pixels strictly below the threshold.
/// A constant image yields an empty mask.
std::pair<double, BinaryMask> otsu_threshold(const GrayImage& img);

/// Background components not connected to the image border become foreground.
BinaryMask fill_holes(const BinaryMask& mask);

BinaryMask opening(const BinaryMask& mask, int radius);

LabelMap baseline_segment(const GrayImage& img, const BaselineConfig& cfg);

}  // namespace shadow::baseline
