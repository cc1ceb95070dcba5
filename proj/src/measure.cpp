#include "shadow/measure.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>

namespace shadow::measure {

std::vector<Region> region_props(const LabelMap& lm) {
    struct Acc {
        long area = 0;
        double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
        int x0 = 1 << 30, y0 = 1 << 30, x1 = -1, y1 = -1;
    };
    std::map<uint32_t, Acc> accs;
    for (int y = 0; y < lm.height; ++y)
        for (int x = 0; x < lm.width; ++x) {
            uint32_t l = lm.at(x, y);
            if (!l) continue;
            Acc& a = accs[l];
            ++a.area;
            a.sx += x;
            a.sy += y;
            a.sxx += static_cast<double>(x) * x;
            a.syy += static_cast<double>(y) * y;
            a.sxy += static_cast<double>(x) * y;
            a.x0 = std::min(a.x0, x);
            a.y0 = std::min(a.y0, y);
            a.x1 = std::max(a.x1, x);
            a.y1 = std::max(a.y1, y);
        }

    std::vector<Region> out;
    out.reserve(accs.size());
    for (const auto& [label, a] : accs) {
        Region r;
        r.label = label;
        r.area = a.area;
        double n = static_cast<double>(a.area);
        r.cx = a.sx / n;
        r.cy = a.sy / n;
        r.r_eq = std::sqrt(n / 3.141592653589793);
        r.x0 = a.x0;
        r.y0 = a.y0;
        r.x1 = a.x1;
        r.y1 = a.y1;

        // normalized central moments with the unit-square correction
        double uxx = a.sxx / n - r.cx * r.cx + 1.0 / 12.0;
        double uyy = a.syy / n - r.cy * r.cy + 1.0 / 12.0;
        double uxy = a.sxy / n - r.cx * r.cy;
        double tr = uxx + uyy;
        double det = std::sqrt(std::max(0.0, (uxx - uyy) * (uxx - uyy) + 4.0 * uxy * uxy));
        double l1 = (tr + det) / 2.0, l2 = (tr - det) / 2.0;
        r.major = 4.0 * std::sqrt(std::max(0.0, l1));
        r.minor = 4.0 * std::sqrt(std::max(0.0, l2));
        r.aspect = r.minor > 0 ? r.major / r.minor : 1.0;
        out.push_back(r);
    }
    return out;
}

void write_measure_csv(const std::vector<Region>& regions, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError(path + ": cannot open for writing");
    out << "label,area,cx,cy,r_eq,major,minor,aspect\n";
    char buf[256];
    for (const auto& r : regions) {
        std::snprintf(buf, sizeof(buf), "%u,%ld,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g\n", r.label,
                      r.area, r.cx, r.cy, r.r_eq, r.major, r.minor, r.aspect);
        out << buf;
    }
    if (!out) throw IoError(path + ": write failed");
}

std::vector<Region> read_measure_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError(path + ": cannot open for reading");
    std::string line;
    if (!std::getline(in, line) || line.rfind("label,area", 0) != 0)
        throw FormatError(path + ": missing measurement CSV header");
    std::vector<Region> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        Region r;
        if (std::sscanf(line.c_str(), "%u,%ld,%lf,%lf,%lf,%lf,%lf,%lf", &r.label, &r.area, &r.cx,
                        &r.cy, &r.r_eq, &r.major, &r.minor, &r.aspect) != 8)
            throw FormatError(path + ": malformed measurement row: " + line);
        out.push_back(r);
    }
    return out;
}

}  // namespace shadow::measure
