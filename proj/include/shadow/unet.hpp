#pragma once
// Residual encoder-decoder with skip connections, Swish activations, and a
// two-channel ReLU head (channel 0 = binary particle image, channel 1 =
// centroid regions).

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "shadow/image.hpp"
#include "shadow/rng.hpp"
#include "shadow/tensor.hpp"

namespace shadow {

struct UNetConfig {
    int depth = 3;
    int base_channels = 16;
    static constexpr int in_channels = 1;
    static constexpr int out_channels = 2;

    void validate() const {
        if (depth < 1) throw ConfigError("unet: depth must be >= 1");
        if (base_channels < 1) throw ConfigError("unet: base_channels must be >= 1");
    }
};

/// Named parameter tensors; std::map keeps iteration deterministic.
struct ModelParams {
    std::map<std::string, Tensor<float>> tensors;
};

/// (name, shape) for every parameter of the architecture, in a stable order.
std::vector<std::pair<std::string, std::vector<int>>> layer_specs(const UNetConfig& cfg);

/// He-normal kernels (std = sqrt(2/fan_in)), zero biases; deterministic per seed.
ModelParams init_params(const UNetConfig& cfg, uint64_t seed);

struct ForwardIds {
    int binary;
    int centroid;
};

template <typename T>
std::map<std::string, int> place_params(Tape<T>& tape, const ModelParams& params) {
    std::map<std::string, int> ids;
    for (const auto& [name, t] : params.tensors) ids[name] = tape.leaf(t.template cast<T>());
    return ids;
}

template <typename T>
int resblock(Tape<T>& tape, const std::map<std::string, int>& p, const std::string& prefix, int x) {
    int c1 = tape.conv2d(x, p.at(prefix + ".c1.w"), p.at(prefix + ".c1.b"));
    int c2 = tape.conv2d(tape.activation(c1, Act::Swish), p.at(prefix + ".c2.w"),
                         p.at(prefix + ".c2.b"));
    int sc = x;
    if (auto it = p.find(prefix + ".sc.w"); it != p.end())
        sc = tape.conv2d(x, it->second, p.at(prefix + ".sc.b"));
    return tape.activation(tape.add(c2, sc), Act::Swish);
}

/// input: [1,H,W] leaf with H,W divisible by 2^depth
template <typename T>
ForwardIds unet_forward(Tape<T>& tape, const UNetConfig& cfg, const std::map<std::string, int>& p,
                        int input) {
    cfg.validate();
    const auto& in = tape.value(input);
    if (in.shape.size() != 3 || in.shape[0] != 1)
        throw DimensionError("unet: input must be [1,H,W], got " + shape_str(in));
    int div = 1 << cfg.depth;
    if (in.shape[1] % div || in.shape[2] % div)
        throw DimensionError("unet: input dimensions must be divisible by 2^depth");

    int x = input;
    std::vector<int> skips;
    for (int l = 0; l < cfg.depth; ++l) {
        x = resblock(tape, p, "enc" + std::to_string(l), x);
        skips.push_back(x);
        x = tape.maxpool2(x);
    }
    x = resblock(tape, p, "bott", x);
    for (int l = cfg.depth - 1; l >= 0; --l) {
        std::string d = "dec" + std::to_string(l);
        int up = tape.conv2d(tape.upsample2(x), p.at(d + ".up.w"), p.at(d + ".up.b"));
        up = tape.activation(up, Act::Swish);
        x = resblock(tape, p, d, tape.concat_c(skips[l], up));
    }
    int head = tape.activation(tape.conv2d(x, p.at("head.w"), p.at("head.b")), Act::Relu);
    return {tape.channel(head, 0), tape.channel(head, 1)};
}

/// Forward pass on one image. Output values are >= 0 and may exceed 1.
std::pair<GrayImage, GrayImage> infer(const ModelParams& params, const UNetConfig& cfg,
                                      const GrayImage& image);

struct CheckpointError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void save_checkpoint(const ModelParams& params, const UNetConfig& cfg, const std::string& path);
std::pair<ModelParams, UNetConfig> load_checkpoint(const std::string& path);

}  // namespace shadow
