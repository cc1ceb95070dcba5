#pragma once
// Deterministic mini-batch training loop with Adam.

#include <optional>
#include <string>
#include <vector>

#include "shadow/loss.hpp"
#include "shadow/synth.hpp"
#include "shadow/unet.hpp"

namespace shadow {

struct TrainConfig {
    int epochs = 50;
    int batch_size = 4;
    double learning_rate = 0.001;
    double beta1 = 0.9, beta2 = 0.999, adam_eps = 1e-8;
    uint64_t seed = 1;
    int checkpoint_every = 10;

    void validate() const {
        if (epochs < 1) throw ConfigError("train: epochs must be >= 1");
        if (batch_size < 1) throw ConfigError("train: batch_size must be >= 1");
        if (!(learning_rate > 0)) throw ConfigError("train: learning_rate must be > 0");
        if (beta1 < 0 || beta1 >= 1 || beta2 < 0 || beta2 >= 1)
            throw ConfigError("train: betas must be in [0,1)");
        if (checkpoint_every < 1) throw ConfigError("train: checkpoint_every must be >= 1");
    }
};

struct AdamState {
    std::map<std::string, std::pair<Tensor<float>, Tensor<float>>> moments;  // (m, v)
    long t = 0;
};

struct EpochLoss {
    double mean_loss = 0;
    double bce_component = 0;
    double tvmse_component = 0;
};

/// One Adam update over the whole parameter set. Missing gradient entries
/// (parameters unreachable from the loss) count as zero gradients.
void adam_step(ModelParams& params, const std::map<std::string, Tensor<float>>& grads,
               AdamState& state, const TrainConfig& cfg);

/// Shuffled mini-batch epochs over the dataset; fully deterministic given
/// (params, dataset, configs). Writes checkpoints under checkpoint_dir every
/// checkpoint_every epochs when a directory is given.
std::vector<EpochLoss> train_epochs(ModelParams& params, const UNetConfig& ucfg,
                                    const std::vector<synth::DatasetSample>& dataset,
                                    const TrainConfig& tcfg, const LossConfig& lcfg,
                                    const std::optional<std::string>& checkpoint_dir = {});

void write_loss_history_csv(const std::vector<EpochLoss>& history, const std::string& path);

}  // namespace shadow
