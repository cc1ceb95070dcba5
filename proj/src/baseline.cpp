#include "shadow/baseline.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

namespace shadow::baseline {

std::pair<double, BinaryMask> otsu_threshold(const GrayImage& img) {
    constexpr int kBins = 256;
    std::array<double, kBins> hist{};
    for (float v : img.data) {
        int b = std::clamp(static_cast<int>(v * kBins), 0, kBins - 1);
        hist[b] += 1.0;
    }
    double total = static_cast<double>(img.size());
    double sum_all = 0;
    for (int b = 0; b < kBins; ++b) sum_all += b * hist[b];

    double best_var = 0;
    int best_k = -1;
    double w0 = 0, sum0 = 0;
    for (int k = 0; k < kBins - 1; ++k) {
        w0 += hist[k];
        sum0 += k * hist[k];
        double w1 = total - w0;
        if (w0 <= 0 || w1 <= 0) continue;
        double m0 = sum0 / w0, m1 = (sum_all - sum0) / w1;
        double var = w0 * w1 * (m0 - m1) * (m0 - m1);
        if (var > best_var) {
            best_var = var;
            best_k = k;
        }
    }

    double threshold;
    BinaryMask mask(img.width, img.height);
    if (best_k < 0) {
        // degenerate (constant) image: threshold at the value itself, empty mask
        threshold = img.size() ? img.data[0] : 0.0;
    } else {
        threshold = static_cast<double>(best_k + 1) / kBins;
        for (size_t i = 0; i < img.size(); ++i) mask.bits[i] = img.data[i] < threshold ? 1 : 0;
    }
    return {threshold, mask};
}

BinaryMask fill_holes(const BinaryMask& mask) {
    // flood the background from the border; unreached background is a hole
    BinaryMask outside(mask.width, mask.height);
    std::vector<size_t> stack;
    auto push = [&](int x, int y) {
        if (x < 0 || y < 0 || x >= mask.width || y >= mask.height) return;
        size_t i = static_cast<size_t>(y) * mask.width + x;
        if (mask.bits[i] || outside.bits[i]) return;
        outside.bits[i] = 1;
        stack.push_back(i);
    };
    for (int x = 0; x < mask.width; ++x) {
        push(x, 0);
        push(x, mask.height - 1);
    }
    for (int y = 0; y < mask.height; ++y) {
        push(0, y);
        push(mask.width - 1, y);
    }
    while (!stack.empty()) {
        size_t p = stack.back();
        stack.pop_back();
        int px = static_cast<int>(p % mask.width), py = static_cast<int>(p / mask.width);
        push(px - 1, py);
        push(px + 1, py);
        push(px, py - 1);
        push(px, py + 1);
    }
    BinaryMask out(mask.width, mask.height);
    for (size_t i = 0; i < out.size(); ++i) out.bits[i] = mask.bits[i] || !outside.bits[i];
    return out;
}

namespace {

std::vector<std::pair<int, int>> disc_offsets(int radius) {
    std::vector<std::pair<int, int>> offs;
    for (int dy = -radius; dy <= radius; ++dy)
        for (int dx = -radius; dx <= radius; ++dx)
            if (dx * dx + dy * dy <= radius * radius) offs.push_back({dx, dy});
    return offs;
}

BinaryMask erode(const BinaryMask& m, const std::vector<std::pair<int, int>>& offs) {
    BinaryMask out(m.width, m.height);
    for (int y = 0; y < m.height; ++y)
        for (int x = 0; x < m.width; ++x) {
            bool keep = true;
            for (auto [dx, dy] : offs) {
                int nx = x + dx, ny = y + dy;
                if (nx < 0 || ny < 0 || nx >= m.width || ny >= m.height || !m.at(nx, ny)) {
                    keep = false;
                    break;
                }
            }
            out.at(x, y) = keep ? 1 : 0;
        }
    return out;
}

BinaryMask dilate(const BinaryMask& m, const std::vector<std::pair<int, int>>& offs) {
    BinaryMask out(m.width, m.height);
    for (int y = 0; y < m.height; ++y)
        for (int x = 0; x < m.width; ++x) {
            if (!m.at(x, y)) continue;
            for (auto [dx, dy] : offs) {
                int nx = x + dx, ny = y + dy;
                if (nx >= 0 && ny >= 0 && nx < m.width && ny < m.height) out.at(nx, ny) = 1;
            }
        }
    return out;
}

}  // namespace

BinaryMask opening(const BinaryMask& mask, int radius) {
    if (radius <= 0) return mask;
    auto offs = disc_offsets(radius);
    return dilate(erode(mask, offs), offs);
}

LabelMap baseline_segment(const GrayImage& img, const BaselineConfig& cfg) {
    cfg.validate();
    auto [tau, mask] = otsu_threshold(img);
    (void)tau;
    mask = opening(fill_holes(mask), cfg.opening_radius);

    segment::DistanceField dist = segment::distance_transform(mask);
    LabelMap comps = segment::label_components(mask);
    uint32_t max_comp = 0;
    for (uint32_t v : comps.labels) max_comp = std::max(max_comp, v);
    std::vector<double> comp_max(max_comp + 1, 0.0);
    for (size_t i = 0; i < comps.size(); ++i)
        comp_max[comps.labels[i]] = std::max(comp_max[comps.labels[i]], dist.dist[i]);

    BinaryMask marker_mask(mask.width, mask.height);
    for (size_t i = 0; i < comps.size(); ++i) {
        uint32_t c = comps.labels[i];
        if (c && dist.dist[i] >= (1.0 - cfg.h_fraction) * comp_max[c]) marker_mask.bits[i] = 1;
    }
    LabelMap markers = segment::label_components(marker_mask);
    return segment::watershed(mask, markers, dist);
}

}  // namespace shadow::baseline
