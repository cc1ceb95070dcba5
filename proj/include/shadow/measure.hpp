#pragma once
// Per-region size and shape properties: equivalent radius and the
// equal-second-moment ellipse axes.

#include <string>
#include <vector>

#include "shadow/image.hpp"

namespace shadow::measure {

struct Region {
    uint32_t label = 0;
    long area = 0;
    double cx = 0, cy = 0;
    double r_eq = 0;            // sqrt(area/pi)
    double major = 0, minor = 0;  // 4*sqrt(eigenvalues), descending
    double aspect = 1;          // major/minor
    int x0 = 0, y0 = 0, x1 = 0, y1 = 0;  // inclusive bbox
};

/// Central second moments carry the +1/12 per-pixel (unit square) correction,
/// so single-pixel and thin regions have finite aspect.
std::vector<Region> region_props(const LabelMap& lm);

void write_measure_csv(const std::vector<Region>& regions, const std::string& path);
std::vector<Region> read_measure_csv(const std::string& path);

}  // namespace shadow::measure
