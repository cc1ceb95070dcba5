#pragma once
// Labeled synthetic bubble-field generation with pixel-exact ground truth.

#include <string>
#include <vector>

#include "shadow/image.hpp"
#include "shadow/rng.hpp"

namespace shadow::synth {

/// One synthetic bubble. Semi-axes are a = r_eq*sqrt(aspect), b = r_eq/sqrt(aspect),
/// so the analytic ellipse area pi*a*b equals pi*r_eq^2 exactly.
struct BubbleSpec {
    double cx = 0, cy = 0;      // sub-pixel center, x right / y down, origin at top-left pixel center
    double r_eq = 0;            // equivalent radius, px
    double aspect = 1;          // >= 1
    double theta = 0;           // orientation, radians in [0,pi)
    double blur_sigma = 0;      // defocus blur scale, px

    double semi_major() const;
    double semi_minor() const;
};

struct SynthConfig {
    int width = 256, height = 256;
    double bubble_count_mean = 100;
    double r_min = 4, r_max = 8;
    double aspect_max = 1.3;
    double background_level = 0.85;
    double gradient_amplitude = 0.05;
    double noise_sigma = 0.02;
    double rim_width = 1.5;
    double blur_sigma_min = 0.5, blur_sigma_max = 1.5;
    double rim_intensity = 0.1, interior_intensity = 0.5, highlight_intensity = 0.9;
    int centroid_radius = 1;    // centroid ground-truth disk radius, px
    uint64_t seed = 1;

    void validate() const;
};

struct DatasetSample {
    GrayImage image;
    GrayImage gt_binary;    // 1 iff pixel center inside the union of bubble ellipses
    GrayImage gt_centroid;  // 1 iff within the centroid disk of some bubble
    std::vector<BubbleSpec> bubbles;
};

std::vector<BubbleSpec> sample_bubbles(const SynthConfig& cfg, Rng& rng);
DatasetSample render_field(const std::vector<BubbleSpec>& bubbles, const SynthConfig& cfg, Rng& rng);

/// Rasterized pixel area of one bubble alone (lattice points inside the ellipse).
long bubble_pixel_area(const BubbleSpec& b);

/// Overlap-unaware void fraction sum(pi r_eq^2) / (W*H).
double void_fraction(const std::vector<BubbleSpec>& bubbles, const SynthConfig& cfg);

void write_bubble_csv(const std::vector<BubbleSpec>& bubbles, const std::string& path);
std::vector<BubbleSpec> read_bubble_csv(const std::string& path);

/// Writes n samples {image, gt_binary, gt_centroid, csv} plus a manifest.
/// Sample k is generated with seed cfg.seed + k, so regeneration is
/// byte-identical and order-independent. Returns the manifest path.
std::string generate_dataset(const SynthConfig& cfg, int n_samples, const std::string& out_dir);

/// Reads every sample listed in a manifest (paths relative to the manifest).
std::vector<DatasetSample> load_dataset(const std::string& manifest_path);

}  // namespace shadow::synth
