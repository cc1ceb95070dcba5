#include "shadow/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "shadow/imgio.hpp"

namespace fs = std::filesystem;

namespace shadow::synth {

double BubbleSpec::semi_major() const { return r_eq * std::sqrt(aspect); }
double BubbleSpec::semi_minor() const { return r_eq / std::sqrt(aspect); }

void SynthConfig::validate() const {
    if (width < 1 || height < 1) throw ConfigError("synth: image dimensions must be >= 1");
    if (!(r_min > 0) || r_min > r_max) throw ConfigError("synth: need 0 < r_min <= r_max");
    if (aspect_max < 1) throw ConfigError("synth: aspect_max must be >= 1");
    if (bubble_count_mean <= 0) throw ConfigError("synth: bubble_count_mean must be > 0");
    for (double v : {background_level, gradient_amplitude, noise_sigma})
        if (v < 0 || v > 1) throw ConfigError("synth: intensity parameters must be in [0,1]");
    if (centroid_radius < 1) throw ConfigError("synth: centroid_radius must be >= 1");
    if (width <= 2 * r_min || height <= 2 * r_min)
        throw ConfigError("synth: image too small to place a bubble of r_min");
}

namespace {

// axis-aligned half-extents of the rotated ellipse
void ellipse_extents(const BubbleSpec& b, double& ex, double& ey) {
    double a = b.semi_major(), bb = b.semi_minor();
    double c = std::cos(b.theta), s = std::sin(b.theta);
    ex = std::sqrt(a * a * c * c + bb * bb * s * s);
    ey = std::sqrt(a * a * s * s + bb * bb * c * c);
}

bool inside_ellipse(const BubbleSpec& b, double x, double y) {
    double dx = x - b.cx, dy = y - b.cy;
    double c = std::cos(b.theta), s = std::sin(b.theta);
    double u = (dx * c + dy * s) / b.semi_major();
    double v = (-dx * s + dy * c) / b.semi_minor();
    return u * u + v * v <= 1.0;
}

void gaussian_blur_patch(std::vector<float>& p, int pw, int ph, double sigma) {
    if (sigma <= 0) return;
    int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<float> k(2 * radius + 1);
    double sum = 0;
    for (int i = -radius; i <= radius; ++i) {
        k[i + radius] = static_cast<float>(std::exp(-0.5 * i * i / (sigma * sigma)));
        sum += k[i + radius];
    }
    for (auto& v : k) v = static_cast<float>(v / sum);

    std::vector<float> tmp(p.size());
    for (int y = 0; y < ph; ++y)
        for (int x = 0; x < pw; ++x) {
            float acc = 0;
            for (int i = -radius; i <= radius; ++i) {
                int xi = std::clamp(x + i, 0, pw - 1);
                acc += k[i + radius] * p[y * pw + xi];
            }
            tmp[y * pw + x] = acc;
        }
    for (int y = 0; y < ph; ++y)
        for (int x = 0; x < pw; ++x) {
            float acc = 0;
            for (int i = -radius; i <= radius; ++i) {
                int yi = std::clamp(y + i, 0, ph - 1);
                acc += k[i + radius] * tmp[yi * pw + x];
            }
            p[y * pw + x] = acc;
        }
}

}  // namespace

std::vector<BubbleSpec> sample_bubbles(const SynthConfig& cfg, Rng& rng) {
    cfg.validate();
    int count = std::max(1, rng.poisson(cfg.bubble_count_mean));
    std::vector<BubbleSpec> out;
    out.reserve(count);
    for (int i = 0; i < count; ++i) {
        BubbleSpec b;
        for (int attempt = 0; attempt < 1000; ++attempt) {
            b.r_eq = rng.uniform(cfg.r_min, cfg.r_max);
            b.aspect = rng.uniform(1.0, cfg.aspect_max);
            b.theta = rng.uniform(0.0, 3.141592653589793);
            b.blur_sigma = rng.uniform(cfg.blur_sigma_min, cfg.blur_sigma_max);
            double ex, ey;
            ellipse_extents(b, ex, ey);
            double xlo = ex, xhi = cfg.width - 1 - ex;
            double ylo = ey, yhi = cfg.height - 1 - ey;
            if (xlo > xhi || ylo > yhi) continue;  // this geometry does not fit, redraw
            b.cx = rng.uniform(xlo, xhi);
            b.cy = rng.uniform(ylo, yhi);
            out.push_back(b);
            break;
        }
        if (out.size() != static_cast<size_t>(i) + 1)
            throw ConfigError("synth: image too small to place a bubble of r_min");
    }
    return out;
}

long bubble_pixel_area(const BubbleSpec& b) {
    double ex, ey;
    ellipse_extents(b, ex, ey);
    long area = 0;
    for (int y = static_cast<int>(std::floor(b.cy - ey)); y <= static_cast<int>(std::ceil(b.cy + ey)); ++y)
        for (int x = static_cast<int>(std::floor(b.cx - ex)); x <= static_cast<int>(std::ceil(b.cx + ex)); ++x)
            if (inside_ellipse(b, x, y)) ++area;
    return area;
}

double void_fraction(const std::vector<BubbleSpec>& bubbles, const SynthConfig& cfg) {
    double acc = 0;
    for (const auto& b : bubbles) acc += 3.141592653589793 * b.r_eq * b.r_eq;
    return acc / (static_cast<double>(cfg.width) * cfg.height);
}

DatasetSample render_field(const std::vector<BubbleSpec>& bubbles, const SynthConfig& cfg, Rng& rng) {
    cfg.validate();
    DatasetSample s;
    s.bubbles = bubbles;
    s.image = GrayImage(cfg.width, cfg.height);
    s.gt_binary = GrayImage(cfg.width, cfg.height);
    s.gt_centroid = GrayImage(cfg.width, cfg.height);

    // background: level + linear gradient along a random direction + Gaussian noise
    double phi = rng.uniform(0.0, 6.283185307179586);
    double gx = std::cos(phi), gy = std::sin(phi);
    for (int y = 0; y < cfg.height; ++y)
        for (int x = 0; x < cfg.width; ++x) {
            double px = cfg.width > 1 ? static_cast<double>(x) / (cfg.width - 1) - 0.5 : 0.0;
            double py = cfg.height > 1 ? static_cast<double>(y) / (cfg.height - 1) - 0.5 : 0.0;
            double v = cfg.background_level + cfg.gradient_amplitude * (px * gx + py * gy);
            if (cfg.noise_sigma > 0) v += cfg.noise_sigma * rng.normal();
            s.image.at(x, y) = static_cast<float>(std::clamp(v, 0.0, 1.0));
        }

    for (const auto& b : bubbles) {
        double ex, ey;
        ellipse_extents(b, ex, ey);
        int margin = static_cast<int>(std::ceil(3.0 * b.blur_sigma)) + 1;
        int x0 = std::max(0, static_cast<int>(std::floor(b.cx - ex)) - margin);
        int x1 = std::min(cfg.width - 1, static_cast<int>(std::ceil(b.cx + ex)) + margin);
        int y0 = std::max(0, static_cast<int>(std::floor(b.cy - ey)) - margin);
        int y1 = std::min(cfg.height - 1, static_cast<int>(std::ceil(b.cy + ey)) + margin);
        int pw = x1 - x0 + 1, ph = y1 - y0 + 1;
        if (pw <= 0 || ph <= 0) continue;

        std::vector<float> patch(static_cast<size_t>(pw) * ph, 1.0f);  // 1 = neutral under min
        double rim_rho = 1.0 - cfg.rim_width / b.r_eq;
        double hl2 = 0.3 * b.r_eq * 0.3 * b.r_eq;
        double c = std::cos(b.theta), sn = std::sin(b.theta);
        for (int y = y0; y <= y1; ++y)
            for (int x = x0; x <= x1; ++x) {
                double dx = x - b.cx, dy = y - b.cy;
                double u = (dx * c + dy * sn) / b.semi_major();
                double v = (-dx * sn + dy * c) / b.semi_minor();
                double rho2 = u * u + v * v;
                if (rho2 > 1.0) continue;
                float val;
                if (dx * dx + dy * dy <= hl2)
                    val = static_cast<float>(cfg.highlight_intensity);
                else if (rho2 >= rim_rho * rim_rho)
                    val = static_cast<float>(cfg.rim_intensity);
                else
                    val = static_cast<float>(cfg.interior_intensity);
                patch[(y - y0) * pw + (x - x0)] = val;
            }
        gaussian_blur_patch(patch, pw, ph, b.blur_sigma);
        for (int y = y0; y <= y1; ++y)
            for (int x = x0; x <= x1; ++x)
                s.image.at(x, y) = std::min(s.image.at(x, y), patch[(y - y0) * pw + (x - x0)]);
    }

    // ground truth from the unblurred analytic ellipses
    for (const auto& b : bubbles) {
        double ex, ey;
        ellipse_extents(b, ex, ey);
        for (int y = std::max(0, static_cast<int>(std::floor(b.cy - ey)));
             y <= std::min(cfg.height - 1, static_cast<int>(std::ceil(b.cy + ey))); ++y)
            for (int x = std::max(0, static_cast<int>(std::floor(b.cx - ex)));
                 x <= std::min(cfg.width - 1, static_cast<int>(std::ceil(b.cx + ex))); ++x)
                if (inside_ellipse(b, x, y)) s.gt_binary.at(x, y) = 1.0f;

        int rcx = static_cast<int>(std::floor(b.cx + 0.5));
        int rcy = static_cast<int>(std::floor(b.cy + 0.5));
        int cr = cfg.centroid_radius;
        for (int y = std::max(0, rcy - cr); y <= std::min(cfg.height - 1, rcy + cr); ++y)
            for (int x = std::max(0, rcx - cr); x <= std::min(cfg.width - 1, rcx + cr); ++x)
                if ((x - rcx) * (x - rcx) + (y - rcy) * (y - rcy) <= cr * cr)
                    s.gt_centroid.at(x, y) = 1.0f;
    }
    return s;
}

void write_bubble_csv(const std::vector<BubbleSpec>& bubbles, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError(path + ": cannot open for writing");
    out << "id,cx,cy,r_eq,aspect,theta,area_px\n";
    char buf[256];
    for (size_t i = 0; i < bubbles.size(); ++i) {
        const auto& b = bubbles[i];
        std::snprintf(buf, sizeof(buf), "%zu,%.10g,%.10g,%.10g,%.10g,%.10g,%ld\n", i + 1, b.cx,
                      b.cy, b.r_eq, b.aspect, b.theta, bubble_pixel_area(b));
        out << buf;
    }
    if (!out) throw IoError(path + ": write failed");
}

std::vector<BubbleSpec> read_bubble_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError(path + ": cannot open for reading");
    std::string line;
    if (!std::getline(in, line) || line.rfind("id,cx,cy,r_eq", 0) != 0)
        throw FormatError(path + ": missing bubble CSV header");
    std::vector<BubbleSpec> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        BubbleSpec b;
        long id, area;
        if (std::sscanf(line.c_str(), "%ld,%lf,%lf,%lf,%lf,%lf,%ld", &id, &b.cx, &b.cy, &b.r_eq,
                        &b.aspect, &b.theta, &area) != 7)
            throw FormatError(path + ": malformed bubble CSV row: " + line);
        out.push_back(b);
    }
    return out;
}

std::string generate_dataset(const SynthConfig& cfg, int n_samples, const std::string& out_dir) {
    cfg.validate();
    if (n_samples < 1) throw ConfigError("synth: n_samples must be >= 1");
    fs::create_directories(out_dir);

    std::ostringstream manifest;
    manifest << "synth.width=" << cfg.width << "\n"
             << "synth.height=" << cfg.height << "\n"
             << "synth.bubble_count_mean=" << cfg.bubble_count_mean << "\n"
             << "synth.r_min=" << cfg.r_min << "\n"
             << "synth.r_max=" << cfg.r_max << "\n"
             << "synth.aspect_max=" << cfg.aspect_max << "\n"
             << "synth.background_level=" << cfg.background_level << "\n"
             << "synth.gradient_amplitude=" << cfg.gradient_amplitude << "\n"
             << "synth.noise_sigma=" << cfg.noise_sigma << "\n"
             << "synth.rim_width=" << cfg.rim_width << "\n"
             << "synth.centroid_radius=" << cfg.centroid_radius << "\n"
             << "synth.seed=" << cfg.seed << "\n\n";

    char name[64];
    for (int k = 0; k < n_samples; ++k) {
        Rng rng(cfg.seed + static_cast<uint64_t>(k));
        auto bubbles = sample_bubbles(cfg, rng);
        auto sample = render_field(bubbles, cfg, rng);

        std::snprintf(name, sizeof(name), "%05d", k);
        std::string img = std::string(name) + "_image.pgm";
        std::string bin = std::string(name) + "_binary.pgm";
        std::string cen = std::string(name) + "_centroid.pgm";
        std::string csv = std::string(name) + "_bubbles.csv";
        imgio::save_image(sample.image, (fs::path(out_dir) / img).string());
        imgio::save_image(sample.gt_binary, (fs::path(out_dir) / bin).string());
        imgio::save_image(sample.gt_centroid, (fs::path(out_dir) / cen).string());
        write_bubble_csv(sample.bubbles, (fs::path(out_dir) / csv).string());
        manifest << k << "," << img << "," << bin << "," << cen << "," << csv << "\n";
    }

    std::string mpath = (fs::path(out_dir) / "manifest.txt").string();
    std::ofstream out(mpath);
    if (!out) throw IoError(mpath + ": cannot open for writing");
    out << manifest.str();
    if (!out) throw IoError(mpath + ": write failed");
    return mpath;
}

std::vector<DatasetSample> load_dataset(const std::string& manifest_path) {
    std::ifstream in(manifest_path);
    if (!in) throw IoError(manifest_path + ": cannot open for reading");
    fs::path base = fs::path(manifest_path).parent_path();
    std::vector<DatasetSample> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line.find('=') != std::string::npos) continue;  // config block
        std::istringstream ls(line);
        std::string idx, img, bin, cen, csv;
        if (!std::getline(ls, idx, ',') || !std::getline(ls, img, ',') ||
            !std::getline(ls, bin, ',') || !std::getline(ls, cen, ',') || !std::getline(ls, csv))
            throw FormatError(manifest_path + ": malformed manifest row: " + line);
        DatasetSample s;
        s.image = imgio::load_image((base / img).string());
        s.gt_binary = imgio::load_image((base / bin).string());
        s.gt_centroid = imgio::load_image((base / cen).string());
        s.bubbles = read_bubble_csv((base / csv).string());
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace shadow::synth
