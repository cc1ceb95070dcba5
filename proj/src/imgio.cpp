#include "shadow/imgio.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdio>
#include <fstream>

namespace shadow::imgio {

namespace {

// PGM header token reader: skips whitespace and '#' comment lines.
int read_header_int(std::istream& in, const char* field) {
    int c = in.get();
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = in.get();
        } else if (std::isspace(c)) {
            c = in.get();
        } else {
            break;
        }
    }
    if (c == EOF || !std::isdigit(c))
        throw FormatError(std::string("malformed header: ") + field);
    long v = 0;
    while (c != EOF && std::isdigit(c)) {
        v = v * 10 + (c - '0');
        if (v > 1000000) throw FormatError(std::string("malformed header: ") + field);
        c = in.get();
    }
    if (c != EOF) in.unget();
    return static_cast<int>(v);
}

void read_p5_header(std::istream& in, const std::string& path, int& w, int& h, int& maxval) {
    char m0 = 0, m1 = 0;
    in.get(m0);
    in.get(m1);
    if (!in || m0 != 'P' || m1 != '5')
        throw FormatError(path + ": malformed header: magic (expected P5)");
    w = read_header_int(in, "width");
    h = read_header_int(in, "height");
    maxval = read_header_int(in, "maxval");
    if (w < 1 || h < 1) throw FormatError(path + ": malformed header: dimensions");
    // exactly one whitespace byte separates maxval from the payload
    int c = in.get();
    if (c == EOF || !std::isspace(c)) throw FormatError(path + ": malformed header: separator");
}

}  // namespace

GrayImage load_image(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path + ": cannot open for reading");
    int w, h, maxval;
    read_p5_header(in, path, w, h, maxval);
    if (maxval != 255) throw FormatError(path + ": unsupported maxval " + std::to_string(maxval));
    GrayImage img(w, h);
    std::vector<uint8_t> buf(img.size());
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (static_cast<size_t>(in.gcount()) != buf.size())
        throw FormatError(path + ": truncated payload");
    for (size_t i = 0; i < buf.size(); ++i) img.data[i] = buf[i] / 255.0f;
    return img;
}

void save_image(const GrayImage& img, const std::string& path) {
    if (img.width < 1 || img.height < 1 || img.data.size() != static_cast<size_t>(img.width) * img.height)
        throw ContractError("save_image: invalid GrayImage");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError(path + ": cannot open for writing");
    out << "P5\n" << img.width << " " << img.height << "\n255\n";
    std::vector<uint8_t> buf(img.size());
    for (size_t i = 0; i < buf.size(); ++i) {
        int q = quantize8(img.data[i]);
        buf[i] = static_cast<uint8_t>(std::clamp(q, 0, 255));
    }
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!out) throw IoError(path + ": write failed");
}

LabelMap load_label_map(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path + ": cannot open for reading");
    int w, h, maxval;
    read_p5_header(in, path, w, h, maxval);
    if (maxval != 65535) throw FormatError(path + ": unsupported maxval " + std::to_string(maxval));
    LabelMap lm(w, h);
    std::vector<uint8_t> buf(lm.size() * 2);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (static_cast<size_t>(in.gcount()) != buf.size())
        throw FormatError(path + ": truncated payload");
    for (size_t i = 0; i < lm.size(); ++i)
        lm.labels[i] = (static_cast<uint32_t>(buf[2 * i]) << 8) | buf[2 * i + 1];
    return lm;
}

void save_label_map(const LabelMap& lm, const std::string& path) {
    for (uint32_t v : lm.labels)
        if (v > 65535)
            throw std::range_error("save_label_map: label " + std::to_string(v) + " exceeds 65535");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError(path + ": cannot open for writing");
    out << "P5\n" << lm.width << " " << lm.height << "\n65535\n";
    std::vector<uint8_t> buf(lm.size() * 2);
    for (size_t i = 0; i < lm.size(); ++i) {
        buf[2 * i] = static_cast<uint8_t>(lm.labels[i] >> 8);
        buf[2 * i + 1] = static_cast<uint8_t>(lm.labels[i] & 0xff);
    }
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!out) throw IoError(path + ": write failed");
}

GrayImage match_intensity(const GrayImage& img, const GrayImage& reference) {
    if (img.size() == 0 || reference.size() == 0)
        throw ContractError("match_intensity: empty image");

    constexpr int kBins = 256;
    auto bin_of = [](float v) {
        int b = static_cast<int>(v * kBins);
        return std::clamp(b, 0, kBins - 1);
    };

    std::array<double, kBins> src_cdf{}, ref_cdf{};
    for (float v : img.data) src_cdf[bin_of(v)] += 1.0;
    for (float v : reference.data) ref_cdf[bin_of(v)] += 1.0;
    double sacc = 0, racc = 0;
    for (int b = 0; b < kBins; ++b) {
        sacc += src_cdf[b];
        racc += ref_cdf[b];
        src_cdf[b] = sacc / static_cast<double>(img.size());
        ref_cdf[b] = racc / static_cast<double>(reference.size());
    }

    // Degenerate source (single occupied bin): map everything through CDF 0.5.
    int occupied = 0;
    for (int b = 0; b < kBins; ++b)
        if ((b == 0 ? src_cdf[b] : src_cdf[b] - src_cdf[b - 1]) > 0.0) ++occupied;

    // inverse reference CDF: smallest bin whose CDF >= p, reported at bin center
    auto ref_inverse = [&](double p) {
        int lo = 0, hi = kBins - 1;
        while (lo < hi) {
            int mid = (lo + hi) / 2;
            if (ref_cdf[mid] >= p)
                hi = mid;
            else
                lo = mid + 1;
        }
        return (static_cast<float>(lo) + 0.5f) / kBins;
    };

    GrayImage out(img.width, img.height);
    for (size_t i = 0; i < img.size(); ++i) {
        double p = occupied <= 1 ? 0.5 : src_cdf[bin_of(img.data[i])];
        out.data[i] = ref_inverse(p);
    }
    return out;
}

}  // namespace shadow::imgio
