#pragma once
// Training objectives: mean binary cross entropy for the binary channel and
// TV-regularized MSE for the centroid channel, both per-pixel normalized so
// magnitudes are resolution-independent.

#include "shadow/tensor.hpp"

namespace shadow {

struct LossConfig {
    double alpha = 0.0001;          // TV weight
    double clamp_eps = 1e-7;        // probability clamp for BCE
    double w_binary = 1.0, w_centroid = 1.0;

    void validate() const {
        if (alpha < 0 || alpha > 1) throw ConfigError("loss: alpha must be in [0,1]");
        if (!(clamp_eps > 0) || clamp_eps >= 0.5) throw ConfigError("loss: clamp_eps in (0,0.5)");
        if (!(w_binary > 0) || !(w_centroid > 0)) throw ConfigError("loss: channel weights > 0");
    }
};

/// -mean[X log Yc + (1-X) log(1-Yc)], Yc = clamp(Y, eps, 1-eps)
template <typename T>
int bce_loss(Tape<T>& tape, int y, const Tensor<T>& x, T clamp_eps) {
    return tape.bce(y, x, clamp_eps);
}

template <typename T>
int tv_value(Tape<T>& tape, int y) {
    return tape.tv(y);
}

/// (1-alpha) * mean((Y-X)^2) + alpha * (TV(Y)/(H*W))^2
template <typename T>
int tv_mse_loss(Tape<T>& tape, int y, const Tensor<T>& x, T alpha) {
    const auto& shape = tape.value(y).shape;
    if (shape.size() != 2) throw DimensionError("tv_mse_loss: needs [H,W]");
    T inv_n = T(1) / static_cast<T>(Tensor<T>::numel(shape));
    int m = tape.mse(y, x);
    int t = tape.square(tape.scale(tape.tv(y), inv_n));
    return tape.add(tape.scale(m, T(1) - alpha), tape.scale(t, alpha));
}

/// w_binary * bce(binary pair) + w_centroid * tv_mse(centroid pair)
template <typename T>
int total_loss(Tape<T>& tape, int y_binary, const Tensor<T>& x_binary, int y_centroid,
               const Tensor<T>& x_centroid, const LossConfig& cfg, int* bce_out = nullptr,
               int* tvmse_out = nullptr) {
    cfg.validate();
    int lb = bce_loss(tape, y_binary, x_binary, static_cast<T>(cfg.clamp_eps));
    int lc = tv_mse_loss(tape, y_centroid, x_centroid, static_cast<T>(cfg.alpha));
    if (bce_out) *bce_out = lb;
    if (tvmse_out) *tvmse_out = lc;
    return tape.add(tape.scale(lb, static_cast<T>(cfg.w_binary)),
                    tape.scale(lc, static_cast<T>(cfg.w_centroid)));
}

}  // namespace shadow
