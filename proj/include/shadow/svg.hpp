#pragma once
// Self-contained SVG bar/line charts for the report subcommand.

#include <string>
#include <vector>

#include "shadow/evalx.hpp"

namespace shadow::svg {

struct Series {
    std::string name;
    std::vector<double> values;  // one value per bin
    std::string color = "#1f77b4";
};

/// Bar chart of the first series with optional line overlays for the rest,
/// sharing the same binning.
std::string histogram_chart(const std::string& title, const std::string& x_label, double lo,
                            double bin_width, const std::vector<Series>& series);

void write_svg(const std::string& content, const std::string& path);

}  // namespace shadow::svg
