#include "shadow/unet.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

namespace shadow {

std::vector<std::pair<std::string, std::vector<int>>> layer_specs(const UNetConfig& cfg) {
    cfg.validate();
    std::vector<std::pair<std::string, std::vector<int>>> specs;
    auto res = [&](const std::string& prefix, int cin, int cout) {
        specs.push_back({prefix + ".c1.w", {cout, cin, 3, 3}});
        specs.push_back({prefix + ".c1.b", {cout}});
        specs.push_back({prefix + ".c2.w", {cout, cout, 3, 3}});
        specs.push_back({prefix + ".c2.b", {cout}});
        if (cin != cout) {
            specs.push_back({prefix + ".sc.w", {cout, cin, 1, 1}});
            specs.push_back({prefix + ".sc.b", {cout}});
        }
    };
    int b = cfg.base_channels;
    for (int l = 0; l < cfg.depth; ++l)
        res("enc" + std::to_string(l), l == 0 ? UNetConfig::in_channels : b << (l - 1), b << l);
    res("bott", b << (cfg.depth - 1), b << cfg.depth);
    for (int l = cfg.depth - 1; l >= 0; --l) {
        std::string d = "dec" + std::to_string(l);
        specs.push_back({d + ".up.w", {b << l, b << (l + 1), 3, 3}});
        specs.push_back({d + ".up.b", {b << l}});
        res(d, b << (l + 1), b << l);
    }
    specs.push_back({"head.w", {UNetConfig::out_channels, b, 1, 1}});
    specs.push_back({"head.b", {UNetConfig::out_channels}});
    return specs;
}

ModelParams init_params(const UNetConfig& cfg, uint64_t seed) {
    Rng rng(seed);
    ModelParams params;
    for (const auto& [name, shape] : layer_specs(cfg)) {
        Tensor<float> t(shape);
        if (shape.size() == 4) {
            double fan_in = static_cast<double>(shape[1]) * shape[2] * shape[3];
            double std = std::sqrt(2.0 / fan_in);
            for (auto& v : t.data) v = static_cast<float>(std * rng.normal());
        }
        params.tensors.emplace(name, std::move(t));
    }
    return params;
}

std::pair<GrayImage, GrayImage> infer(const ModelParams& params, const UNetConfig& cfg,
                                      const GrayImage& image) {
    Tape<float> tape;
    auto ids = place_params(tape, params);
    Tensor<float> in({1, image.height, image.width});
    std::copy(image.data.begin(), image.data.end(), in.data.begin());
    int input = tape.leaf(std::move(in));
    auto out = unet_forward(tape, cfg, ids, input);
    GrayImage binary(image.width, image.height), centroid(image.width, image.height);
    binary.data = tape.value(out.binary).data;
    centroid.data = tape.value(out.centroid).data;
    return {std::move(binary), std::move(centroid)};
}

namespace {
constexpr char kMagic[4] = {'S', 'T', 'C', 'K'};
constexpr uint32_t kVersion = 1;

template <typename U>
void write_le(std::ostream& out, U v) {
    unsigned char buf[sizeof(U)];
    for (size_t i = 0; i < sizeof(U); ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
    out.write(reinterpret_cast<const char*>(buf), sizeof(U));
}

template <typename U>
U read_le(std::istream& in) {
    unsigned char buf[sizeof(U)];
    in.read(reinterpret_cast<char*>(buf), sizeof(U));
    if (!in) throw CheckpointError("checkpoint: truncated file");
    U v = 0;
    for (size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(buf[i]) << (8 * i);
    return v;
}
}  // namespace

void save_checkpoint(const ModelParams& params, const UNetConfig& cfg, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError(path + ": cannot open for writing");
    out.write(kMagic, 4);
    write_le<uint32_t>(out, kVersion);
    write_le<uint32_t>(out, static_cast<uint32_t>(params.tensors.size()));
    for (const auto& [name, t] : params.tensors) {
        write_le<uint16_t>(out, static_cast<uint16_t>(name.size()));
        out.write(name.data(), static_cast<std::streamsize>(name.size()));
        out.put(static_cast<char>(t.shape.size()));
        for (int d : t.shape) write_le<uint32_t>(out, static_cast<uint32_t>(d));
        for (float v : t.data) {
            uint32_t bits;
            std::memcpy(&bits, &v, 4);
            write_le<uint32_t>(out, bits);
        }
    }
    write_le<uint32_t>(out, static_cast<uint32_t>(cfg.depth));
    write_le<uint32_t>(out, static_cast<uint32_t>(cfg.base_channels));
    if (!out) throw IoError(path + ": write failed");
}

std::pair<ModelParams, UNetConfig> load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path + ": cannot open for reading");
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0)
        throw CheckpointError(path + ": bad checkpoint magic");
    uint32_t version = read_le<uint32_t>(in);
    if (version != kVersion)
        throw CheckpointError(path + ": unsupported checkpoint version " + std::to_string(version));
    uint32_t count = read_le<uint32_t>(in);

    ModelParams params;
    for (uint32_t i = 0; i < count; ++i) {
        uint16_t len = read_le<uint16_t>(in);
        std::string name(len, '\0');
        in.read(name.data(), len);
        int rank = in.get();
        if (!in || rank < 0 || rank > 8) throw CheckpointError(path + ": bad array rank");
        std::vector<int> shape(rank);
        for (auto& d : shape) d = static_cast<int>(read_le<uint32_t>(in));
        Tensor<float> t(shape);
        for (auto& v : t.data) {
            uint32_t bits = read_le<uint32_t>(in);
            std::memcpy(&v, &bits, 4);
        }
        params.tensors.emplace(std::move(name), std::move(t));
    }
    UNetConfig cfg;
    cfg.depth = static_cast<int>(read_le<uint32_t>(in));
    cfg.base_channels = static_cast<int>(read_le<uint32_t>(in));
    cfg.validate();

    // shapes must agree with what the config implies
    auto specs = layer_specs(cfg);
    if (specs.size() != params.tensors.size())
        throw CheckpointError(path + ": array count inconsistent with config");
    for (const auto& [name, shape] : specs) {
        auto it = params.tensors.find(name);
        if (it == params.tensors.end() || it->second.shape != shape)
            throw CheckpointError(path + ": shape mismatch for " + name);
    }
    return {std::move(params), cfg};
}

}  // namespace shadow
