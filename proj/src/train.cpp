#include "shadow/train.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

namespace shadow {

void adam_step(ModelParams& params, const std::map<std::string, Tensor<float>>& grads,
               AdamState& state, const TrainConfig& cfg) {
    cfg.validate();
    if (state.moments.empty())
        for (const auto& [name, t] : params.tensors)
            state.moments.emplace(name, std::make_pair(Tensor<float>(t.shape), Tensor<float>(t.shape)));

    state.t += 1;
    double b1t = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.t));
    double b2t = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.t));

    for (auto& [name, theta] : params.tensors) {
        auto& [m, v] = state.moments.at(name);
        const Tensor<float>* g = nullptr;
        if (auto it = grads.find(name); it != grads.end() && it->second.numel() != 0) {
            if (it->second.shape != theta.shape)
                throw DimensionError("adam_step: gradient shape mismatch for " + name);
            g = &it->second;
        }
        for (size_t i = 0; i < theta.data.size(); ++i) {
            double gi = g ? g->data[i] : 0.0;
            m.data[i] = static_cast<float>(cfg.beta1 * m.data[i] + (1.0 - cfg.beta1) * gi);
            v.data[i] = static_cast<float>(cfg.beta2 * v.data[i] + (1.0 - cfg.beta2) * gi * gi);
            double mhat = m.data[i] / b1t;
            double vhat = v.data[i] / b2t;
            theta.data[i] -=
                static_cast<float>(cfg.learning_rate * mhat / (std::sqrt(vhat) + cfg.adam_eps));
        }
    }
}

namespace {

struct SampleTensors {
    Tensor<float> input;    // [1,H,W]
    Tensor<float> gt_bin;   // [H,W]
    Tensor<float> gt_cen;   // [H,W]
};

SampleTensors to_tensors(const synth::DatasetSample& s) {
    SampleTensors t;
    t.input = Tensor<float>({1, s.image.height, s.image.width});
    std::copy(s.image.data.begin(), s.image.data.end(), t.input.data.begin());
    t.gt_bin = Tensor<float>({s.image.height, s.image.width}, s.gt_binary.data);
    t.gt_cen = Tensor<float>({s.image.height, s.image.width}, s.gt_centroid.data);
    return t;
}

}  // namespace

std::vector<EpochLoss> train_epochs(ModelParams& params, const UNetConfig& ucfg,
                                    const std::vector<synth::DatasetSample>& dataset,
                                    const TrainConfig& tcfg, const LossConfig& lcfg,
                                    const std::optional<std::string>& checkpoint_dir) {
    tcfg.validate();
    lcfg.validate();
    if (dataset.empty()) throw ConfigError("train: dataset must be non-empty");

    std::vector<SampleTensors> samples;
    samples.reserve(dataset.size());
    for (const auto& s : dataset) samples.push_back(to_tensors(s));

    AdamState state;
    std::vector<EpochLoss> history;
    std::vector<size_t> order(samples.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;

    for (int epoch = 0; epoch < tcfg.epochs; ++epoch) {
        // seeded Fisher-Yates; the permutation depends only on (seed, epoch)
        Rng rng(tcfg.seed ^ static_cast<uint64_t>(epoch));
        for (size_t i = order.size(); i > 1; --i) {
            size_t j = rng.next_u64() % i;
            std::swap(order[i - 1], order[j]);
        }

        EpochLoss ep;
        size_t n_batches = 0;
        for (size_t start = 0; start < order.size(); start += tcfg.batch_size) {
            size_t end = std::min(order.size(), start + static_cast<size_t>(tcfg.batch_size));
            float inv = 1.0f / static_cast<float>(end - start);

            std::map<std::string, Tensor<float>> grads;
            double batch_total = 0, batch_bce = 0, batch_tvmse = 0;
            for (size_t bi = start; bi < end; ++bi) {
                const auto& st = samples[order[bi]];
                Tape<float> tape;
                auto ids = place_params(tape, params);
                int input = tape.leaf(st.input);
                ForwardIds out;
                try {
                    out = unet_forward(tape, ucfg, ids, input);
                } catch (const DimensionError& e) {
                    throw DimensionError("train: sample " + std::to_string(order[bi]) + ": " +
                                         e.what());
                }
                int lb, lc;
                int loss = total_loss(tape, out.binary, st.gt_bin, out.centroid, st.gt_cen, lcfg,
                                      &lb, &lc);
                tape.backward(loss);
                batch_total += tape.scalar(loss);
                batch_bce += tape.scalar(lb);
                batch_tvmse += tape.scalar(lc);
                // fixed-order gradient reduction keeps results deterministic
                for (const auto& [name, id] : ids) {
                    const auto& g = tape.grad(id);
                    if (g.numel() == 0) continue;
                    auto [it, fresh] = grads.try_emplace(name, Tensor<float>(g.shape));
                    for (size_t i = 0; i < g.data.size(); ++i) it->second.data[i] += inv * g.data[i];
                }
            }
            adam_step(params, grads, state, tcfg);
            ep.mean_loss += batch_total * inv;
            ep.bce_component += batch_bce * inv;
            ep.tvmse_component += batch_tvmse * inv;
            ++n_batches;
        }
        ep.mean_loss /= static_cast<double>(n_batches);
        ep.bce_component /= static_cast<double>(n_batches);
        ep.tvmse_component /= static_cast<double>(n_batches);
        history.push_back(ep);

        if (checkpoint_dir && ((epoch + 1) % tcfg.checkpoint_every == 0 || epoch + 1 == tcfg.epochs)) {
            std::filesystem::create_directories(*checkpoint_dir);
            char name[64];
            std::snprintf(name, sizeof(name), "epoch_%04d.stck", epoch + 1);
            save_checkpoint(params, ucfg, (std::filesystem::path(*checkpoint_dir) / name).string());
        }
    }
    return history;
}

void write_loss_history_csv(const std::vector<EpochLoss>& history, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError(path + ": cannot open for writing");
    out << "epoch,mean_loss,bce_component,tvmse_component\n";
    char buf[160];
    for (size_t i = 0; i < history.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%zu,%.10g,%.10g,%.10g\n", i + 1, history[i].mean_loss,
                      history[i].bce_component, history[i].tvmse_component);
        out << buf;
    }
    if (!out) throw IoError(path + ": write failed");
}

}  // namespace shadow
