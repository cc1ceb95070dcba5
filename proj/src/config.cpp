#include "shadow/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace shadow {

namespace {

struct Entry {
    std::function<void(RunConfig&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
};

template <typename T>
void parse_into(T& dst, const std::string& v, const std::string& key) {
    std::istringstream is(v);
    is >> dst;
    if (is.fail() || !(is >> std::ws).eof())
        throw ConfigError("config: bad value '" + v + "' for key " + key);
}

template <typename T>
std::string to_str(const T& v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

const std::map<std::string, Entry>& schema() {
    static const std::map<std::string, Entry> s = [] {
        std::map<std::string, Entry> m;
        auto reg = [&m](const std::string& key, auto member_ptr, auto owner_ptr) {
            m[key] = {[key, member_ptr, owner_ptr](RunConfig& c, const std::string& v) {
                          parse_into((c.*owner_ptr).*member_ptr, v, key);
                      },
                      [member_ptr, owner_ptr](const RunConfig& c) {
                          return to_str((c.*owner_ptr).*member_ptr);
                      }};
        };
        reg("synth.width", &synth::SynthConfig::width, &RunConfig::synth);
        reg("synth.height", &synth::SynthConfig::height, &RunConfig::synth);
        reg("synth.bubble_count_mean", &synth::SynthConfig::bubble_count_mean, &RunConfig::synth);
        reg("synth.r_min", &synth::SynthConfig::r_min, &RunConfig::synth);
        reg("synth.r_max", &synth::SynthConfig::r_max, &RunConfig::synth);
        reg("synth.aspect_max", &synth::SynthConfig::aspect_max, &RunConfig::synth);
        reg("synth.background_level", &synth::SynthConfig::background_level, &RunConfig::synth);
        reg("synth.gradient_amplitude", &synth::SynthConfig::gradient_amplitude, &RunConfig::synth);
        reg("synth.noise_sigma", &synth::SynthConfig::noise_sigma, &RunConfig::synth);
        reg("synth.rim_width", &synth::SynthConfig::rim_width, &RunConfig::synth);
        reg("synth.blur_sigma_min", &synth::SynthConfig::blur_sigma_min, &RunConfig::synth);
        reg("synth.blur_sigma_max", &synth::SynthConfig::blur_sigma_max, &RunConfig::synth);
        reg("synth.rim_intensity", &synth::SynthConfig::rim_intensity, &RunConfig::synth);
        reg("synth.interior_intensity", &synth::SynthConfig::interior_intensity, &RunConfig::synth);
        reg("synth.highlight_intensity", &synth::SynthConfig::highlight_intensity, &RunConfig::synth);
        reg("synth.centroid_radius", &synth::SynthConfig::centroid_radius, &RunConfig::synth);
        reg("synth.seed", &synth::SynthConfig::seed, &RunConfig::synth);
        reg("unet.depth", &UNetConfig::depth, &RunConfig::unet);
        reg("unet.base_channels", &UNetConfig::base_channels, &RunConfig::unet);
        reg("train.epochs", &TrainConfig::epochs, &RunConfig::train);
        reg("train.batch_size", &TrainConfig::batch_size, &RunConfig::train);
        reg("train.learning_rate", &TrainConfig::learning_rate, &RunConfig::train);
        reg("train.beta1", &TrainConfig::beta1, &RunConfig::train);
        reg("train.beta2", &TrainConfig::beta2, &RunConfig::train);
        reg("train.adam_eps", &TrainConfig::adam_eps, &RunConfig::train);
        reg("train.seed", &TrainConfig::seed, &RunConfig::train);
        reg("train.checkpoint_every", &TrainConfig::checkpoint_every, &RunConfig::train);
        reg("loss.alpha", &LossConfig::alpha, &RunConfig::loss);
        reg("loss.clamp_eps", &LossConfig::clamp_eps, &RunConfig::loss);
        reg("loss.w_binary", &LossConfig::w_binary, &RunConfig::loss);
        reg("loss.w_centroid", &LossConfig::w_centroid, &RunConfig::loss);
        reg("segment.binary_threshold", &segment::SegmentConfig::binary_threshold,
            &RunConfig::segment);
        reg("segment.marker_threshold", &segment::SegmentConfig::marker_threshold,
            &RunConfig::segment);
        reg("segment.min_marker_area", &segment::SegmentConfig::min_marker_area,
            &RunConfig::segment);
        reg("baseline.opening_radius", &baseline::BaselineConfig::opening_radius,
            &RunConfig::baseline);
        reg("baseline.h_fraction", &baseline::BaselineConfig::h_fraction, &RunConfig::baseline);
        m["eval.size_bin_width"] = {
            [](RunConfig& c, const std::string& v) {
                parse_into(c.eval_size_bin_width, v, "eval.size_bin_width");
            },
            [](const RunConfig& c) { return to_str(c.eval_size_bin_width); }};
        return m;
    }();
    return s;
}

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    size_t b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

}  // namespace

void RunConfig::validate() const {
    synth.validate();
    unet.validate();
    train.validate();
    loss.validate();
    segment.validate();
    baseline.validate();
    if (!(eval_size_bin_width > 0)) throw ConfigError("config: eval.size_bin_width must be > 0");
}

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key=value");
        std::string key = trim(t.substr(0, eq));
        std::string val = trim(t.substr(eq + 1));
        auto it = schema().find(key);
        if (it == schema().end())
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": unknown key " + key);
        it->second.set(cfg, val);
    }
    cfg.validate();
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError(path + ": cannot open for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), path);
}

std::string config_reference() {
    RunConfig defaults;
    std::ostringstream os;
    os << "# Accepted configuration keys (key = default)\n";
    for (const auto& [key, entry] : schema()) os << key << " = " << entry.get(defaults) << "\n";
    return os.str();
}

}  // namespace shadow
