#include "shadow/segment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

namespace shadow::segment {

BinaryMask threshold_mask(const GrayImage& img, double tau) {
    BinaryMask m(img.width, img.height);
    for (size_t i = 0; i < img.size(); ++i) m.bits[i] = img.data[i] >= tau ? 1 : 0;
    return m;
}

LabelMap label_components(const BinaryMask& mask) {
    LabelMap lm(mask.width, mask.height);
    uint32_t next = 1;
    std::vector<size_t> stack;
    for (int y = 0; y < mask.height; ++y)
        for (int x = 0; x < mask.width; ++x) {
            if (!mask.at(x, y) || lm.at(x, y)) continue;
            uint32_t label = next++;
            lm.at(x, y) = label;
            stack.push_back(static_cast<size_t>(y) * mask.width + x);
            while (!stack.empty()) {
                size_t p = stack.back();
                stack.pop_back();
                int px = static_cast<int>(p % mask.width), py = static_cast<int>(p / mask.width);
                for (int dy = -1; dy <= 1; ++dy)
                    for (int dx = -1; dx <= 1; ++dx) {
                        int nx = px + dx, ny = py + dy;
                        if (nx < 0 || ny < 0 || nx >= mask.width || ny >= mask.height) continue;
                        if (mask.at(nx, ny) && !lm.at(nx, ny)) {
                            lm.at(nx, ny) = label;
                            stack.push_back(static_cast<size_t>(ny) * mask.width + nx);
                        }
                    }
            }
        }
    return lm;
}

LabelMap extract_markers(const GrayImage& centroid_channel, const SegmentConfig& cfg) {
    cfg.validate();
    LabelMap raw = label_components(threshold_mask(centroid_channel, cfg.marker_threshold));
    uint32_t max_label = 0;
    for (uint32_t v : raw.labels) max_label = std::max(max_label, v);
    std::vector<long> area(max_label + 1, 0);
    for (uint32_t v : raw.labels) ++area[v];

    // relabel surviving components contiguously, preserving discovery order
    std::vector<uint32_t> remap(max_label + 1, 0);
    uint32_t next = 1;
    for (uint32_t l = 1; l <= max_label; ++l)
        if (area[l] >= cfg.min_marker_area) remap[l] = next++;
    for (auto& v : raw.labels) v = remap[v];
    return raw;
}

namespace {

// 1-D squared-distance lower envelope (Felzenszwalb & Huttenlocher)
void edt_1d(const std::vector<double>& f, int n, std::vector<double>& d, std::vector<int>& v,
            std::vector<double>& z) {
    constexpr double kInf = std::numeric_limits<double>::infinity();
    int k = 0;
    v[0] = 0;
    z[0] = -kInf;
    z[1] = kInf;
    for (int q = 1; q < n; ++q) {
        double s;
        while (true) {
            int p = v[k];
            s = ((f[q] + static_cast<double>(q) * q) - (f[p] + static_cast<double>(p) * p)) /
                (2.0 * (q - p));
            if (s <= z[k])
                --k;
            else
                break;
        }
        ++k;
        v[k] = q;
        z[k] = s;
        z[k + 1] = kInf;
    }
    k = 0;
    for (int q = 0; q < n; ++q) {
        while (z[k + 1] < q) ++k;
        double dq = q - v[k];
        d[q] = dq * dq + f[v[k]];
    }
}

}  // namespace

DistanceField distance_transform(const BinaryMask& mask) {
    // one-pixel virtual background frame realizes "border adjacent to background"
    const int w = mask.width + 2, h = mask.height + 2;
    constexpr double kInf = 1e18;
    std::vector<double> grid(static_cast<size_t>(w) * h, 0.0);
    for (int y = 0; y < mask.height; ++y)
        for (int x = 0; x < mask.width; ++x)
            grid[static_cast<size_t>(y + 1) * w + (x + 1)] = mask.at(x, y) ? kInf : 0.0;

    int n = std::max(w, h);
    std::vector<double> f(n), d(n), z(n + 1);
    std::vector<int> v(n);

    for (int x = 0; x < w; ++x) {
        for (int y = 0; y < h; ++y) f[y] = grid[static_cast<size_t>(y) * w + x];
        edt_1d(f, h, d, v, z);
        for (int y = 0; y < h; ++y) grid[static_cast<size_t>(y) * w + x] = d[y];
    }
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) f[x] = grid[static_cast<size_t>(y) * w + x];
        edt_1d(f, w, d, v, z);
        for (int x = 0; x < w; ++x) grid[static_cast<size_t>(y) * w + x] = d[x];
    }

    DistanceField out(mask.width, mask.height);
    for (int y = 0; y < mask.height; ++y)
        for (int x = 0; x < mask.width; ++x)
            out.at(x, y) = std::sqrt(grid[static_cast<size_t>(y + 1) * w + (x + 1)]);
    return out;
}

LabelMap watershed(const BinaryMask& mask, const LabelMap& markers, const DistanceField& dist) {
    if (markers.width != mask.width || markers.height != mask.height ||
        dist.width != mask.width || dist.height != mask.height)
        throw DimensionError("watershed: mask/markers/dist dimensions disagree");

    struct Entry {
        double priority;  // -dist: deepest first
        uint64_t seq;     // FIFO within equal priority
        int x, y;
        uint32_t label;
        bool operator>(const Entry& o) const {
            if (priority != o.priority) return priority > o.priority;
            return seq > o.seq;
        }
    };
    std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> pq;
    LabelMap out(mask.width, mask.height);
    uint64_t seq = 0;

    for (int y = 0; y < mask.height; ++y)
        for (int x = 0; x < mask.width; ++x)
            if (uint32_t l = markers.at(x, y)) {
                if (!mask.at(x, y))
                    throw ContractError("watershed: marker pixel off foreground at (" +
                                        std::to_string(x) + "," + std::to_string(y) + ")");
                out.at(x, y) = l;
                pq.push({-dist.at(x, y), seq++, x, y, l});
            }

    while (!pq.empty()) {
        Entry e = pq.top();
        pq.pop();
        for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx) {
                int nx = e.x + dx, ny = e.y + dy;
                if (nx < 0 || ny < 0 || nx >= mask.width || ny >= mask.height) continue;
                if (!mask.at(nx, ny) || out.at(nx, ny)) continue;
                out.at(nx, ny) = e.label;
                pq.push({-dist.at(nx, ny), seq++, nx, ny, e.label});
            }
    }
    return out;
}

LabelMap segment_image(const GrayImage& binary_channel, const GrayImage& centroid_channel,
                       const SegmentConfig& cfg) {
    cfg.validate();
    BinaryMask mask = threshold_mask(binary_channel, cfg.binary_threshold);
    LabelMap markers = extract_markers(centroid_channel, cfg);
    // clip markers to the mask; watershed requires every marker on foreground
    for (size_t i = 0; i < mask.size(); ++i)
        if (!mask.bits[i]) markers.labels[i] = 0;

    DistanceField dist = distance_transform(mask);
    LabelMap out = watershed(mask, markers, dist);

    // foreground components no marker reached become whole particles
    uint32_t next = 0;
    for (uint32_t v : out.labels) next = std::max(next, v);
    ++next;
    LabelMap comps = label_components(mask);
    uint32_t max_comp = 0;
    for (uint32_t v : comps.labels) max_comp = std::max(max_comp, v);
    std::vector<uint8_t> has_marker(max_comp + 1, 0);
    for (size_t i = 0; i < out.size(); ++i)
        if (out.labels[i]) has_marker[comps.labels[i]] = 1;
    std::vector<uint32_t> fresh(max_comp + 1, 0);
    for (size_t i = 0; i < out.size(); ++i) {
        uint32_t c = comps.labels[i];
        if (!c || has_marker[c]) continue;
        if (!fresh[c]) fresh[c] = next++;
        out.labels[i] = fresh[c];
    }
    return out;
}

GrayImage edge_overlay(const GrayImage& base, const LabelMap& lm) {
    GrayImage out = base;
    for (int y = 0; y < lm.height; ++y)
        for (int x = 0; x < lm.width; ++x) {
            uint32_t l = lm.at(x, y);
            if (!l) continue;
            bool edge = false;
            for (int dy = -1; dy <= 1 && !edge; ++dy)
                for (int dx = -1; dx <= 1 && !edge; ++dx) {
                    int nx = x + dx, ny = y + dy;
                    if (nx < 0 || ny < 0 || nx >= lm.width || ny >= lm.height) continue;
                    if (lm.at(nx, ny) != l) edge = true;
                }
            if (edge) out.at(x, y) = 1.0f;
        }
    return out;
}

}  // namespace shadow::segment
