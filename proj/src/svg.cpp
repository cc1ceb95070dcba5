#include "shadow/svg.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace shadow::svg {

std::string histogram_chart(const std::string& title, const std::string& x_label, double lo,
                            double bin_width, const std::vector<Series>& series) {
    const int width = 640, height = 420;
    const int ml = 60, mr = 20, mt = 40, mb = 50;
    const int pw = width - ml - mr, ph = height - mt - mb;

    size_t nbins = 0;
    double vmax = 0;
    for (const auto& s : series) {
        nbins = std::max(nbins, s.values.size());
        for (double v : s.values) vmax = std::max(vmax, v);
    }
    if (nbins == 0) nbins = 1;
    if (vmax <= 0) vmax = 1;
    vmax *= 1.1;

    auto xpos = [&](double bin) { return ml + pw * bin / static_cast<double>(nbins); };
    auto ypos = [&](double v) { return mt + ph * (1.0 - v / vmax); };

    std::ostringstream os;
    char buf[512];
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
       << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
       << title << "</text>\n";
    os << "<text x=\"" << width / 2 << "\" y=\"" << height - 10
       << "\" text-anchor=\"middle\" font-size=\"12\">" << x_label << "</text>\n";

    // axes
    std::snprintf(buf, sizeof(buf),
                  "<line x1=\"%d\" y1=\"%d\" x2=\"%d\" y2=\"%d\" stroke=\"black\"/>\n", ml,
                  mt + ph, ml + pw, mt + ph);
    os << buf;
    std::snprintf(buf, sizeof(buf),
                  "<line x1=\"%d\" y1=\"%d\" x2=\"%d\" y2=\"%d\" stroke=\"black\"/>\n", ml, mt, ml,
                  mt + ph);
    os << buf;
    for (size_t b = 0; b <= nbins; ++b) {
        double x = xpos(static_cast<double>(b));
        std::snprintf(buf, sizeof(buf),
                      "<text x=\"%.1f\" y=\"%d\" text-anchor=\"middle\" font-size=\"10\">%g</text>\n",
                      x, mt + ph + 16, lo + b * bin_width);
        os << buf;
    }

    bool bars_done = false;
    for (const auto& s : series) {
        if (!bars_done) {
            for (size_t b = 0; b < s.values.size(); ++b) {
                double x0 = xpos(static_cast<double>(b)) + 1;
                double x1 = xpos(static_cast<double>(b) + 1) - 1;
                double y = ypos(s.values[b]);
                std::snprintf(buf, sizeof(buf),
                              "<rect x=\"%.1f\" y=\"%.1f\" width=\"%.1f\" height=\"%.1f\" "
                              "fill=\"%s\" fill-opacity=\"0.6\"/>\n",
                              x0, y, x1 - x0, mt + ph - y, s.color.c_str());
                os << buf;
            }
            bars_done = true;
        } else {
            os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"2\" points=\"";
            for (size_t b = 0; b < s.values.size(); ++b) {
                double x = (xpos(static_cast<double>(b)) + xpos(static_cast<double>(b) + 1)) / 2;
                std::snprintf(buf, sizeof(buf), "%.1f,%.1f ", x, ypos(s.values[b]));
                os << buf;
            }
            os << "\"/>\n";
        }
    }

    // legend
    int ly = mt + 8;
    for (const auto& s : series) {
        std::snprintf(buf, sizeof(buf),
                      "<rect x=\"%d\" y=\"%d\" width=\"12\" height=\"12\" fill=\"%s\"/>"
                      "<text x=\"%d\" y=\"%d\" font-size=\"12\">%s</text>\n",
                      ml + pw - 150, ly - 10, s.color.c_str(), ml + pw - 132, ly, s.name.c_str());
        os << buf;
        ly += 18;
    }
    os << "</svg>\n";
    return os.str();
}

void write_svg(const std::string& content, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError(path + ": cannot open for writing");
    out << content;
    if (!out) throw IoError(path + ": write failed");
}

}  // namespace shadow::svg
