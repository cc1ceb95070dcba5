#pragma once
// Marker-controlled watershed over the Euclidean distance transform.

#include "shadow/image.hpp"

namespace shadow::segment {

struct DistanceField {
    int width = 0;
    int height = 0;
    std::vector<double> dist;  // 0 on background; exact Euclidean distance on foreground

    DistanceField() = default;
    DistanceField(int w, int h) : width(w), height(h), dist(static_cast<size_t>(w) * h, 0) {}
    double at(int x, int y) const { return dist[static_cast<size_t>(y) * width + x]; }
    double& at(int x, int y) { return dist[static_cast<size_t>(y) * width + x]; }
};

struct SegmentConfig {
    double binary_threshold = 0.5;   // tau_b
    double marker_threshold = 0.5;   // tau_m
    int min_marker_area = 2;

    void validate() const {
        if (!(binary_threshold > 0) || binary_threshold >= 1 || !(marker_threshold > 0) ||
            marker_threshold >= 1)
            throw ConfigError("segment: thresholds must be in (0,1)");
        if (min_marker_area < 1) throw ConfigError("segment: min_marker_area must be >= 1");
    }
};

/// 8-connected component labeling, labels 1..K in row-major discovery order.
LabelMap label_components(const BinaryMask& mask);

/// Threshold at tau_m, label 8-connected components, drop those smaller than
/// min_marker_area (remaining labels stay contiguous 1..K).
LabelMap extract_markers(const GrayImage& centroid_channel, const SegmentConfig& cfg);

/// Exact Euclidean distance to the nearest background pixel via the two-pass
/// squared-distance lower-envelope algorithm; the image border counts as
/// adjacent to background.
DistanceField distance_transform(const BinaryMask& mask);

/// Priority flood from the markers over foreground only (8-connected),
/// deepest pixels first, FIFO within equal priority. Foreground unreachable
/// from any marker keeps label 0.
LabelMap watershed(const BinaryMask& mask, const LabelMap& markers, const DistanceField& dist);

/// Full step (ii): threshold, markers, distance transform, watershed.
/// Marker pixels falling outside the thresholded mask are dropped; foreground
/// components containing no marker get one fresh label each.
LabelMap segment_image(const GrayImage& binary_channel, const GrayImage& centroid_channel,
                       const SegmentConfig& cfg);

BinaryMask threshold_mask(const GrayImage& img, double tau);

/// Grayscale edge-overlay of a segmentation for visual inspection.
GrayImage edge_overlay(const GrayImage& base, const LabelMap& lm);

}  // namespace shadow::segment
