#pragma once
// Minimal dense tensors with reverse-mode differentiation, sized for the
// U-net and its two losses. 32-bit storage is the working precision; every
// operation is also instantiated for double so gradient checks can run in
// 64-bit mode.

#include <cmath>
#include <functional>
#include <memory>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "shadow/image.hpp"
#include "shadow/kernels.hpp"

namespace shadow {

template <typename T>
struct Tensor {
    std::vector<int> shape;
    std::vector<T> data;

    Tensor() = default;
    explicit Tensor(std::vector<int> s, T fill = T(0)) : shape(std::move(s)) {
        data.assign(numel(shape), fill);
    }
    Tensor(std::vector<int> s, std::vector<T> d) : shape(std::move(s)), data(std::move(d)) {
        if (data.size() != numel(shape)) throw DimensionError("tensor: data length != shape product");
    }

    static size_t numel(const std::vector<int>& s) {
        size_t n = 1;
        for (int e : s) n *= static_cast<size_t>(e);
        return n;
    }
    size_t numel() const { return data.size(); }

    template <typename U>
    Tensor<U> cast() const {
        Tensor<U> out;
        out.shape = shape;
        out.data.resize(data.size());
        for (size_t i = 0; i < data.size(); ++i) out.data[i] = static_cast<U>(data[i]);
        return out;
    }
};

template <typename T>
std::string shape_str(const Tensor<T>& t) {
    std::ostringstream os;
    os << "[";
    for (size_t i = 0; i < t.shape.size(); ++i) os << (i ? "," : "") << t.shape[i];
    os << "]";
    return os.str();
}

enum class Act { Swish, Relu, Sigmoid };

/// Reverse-mode tape. Operations append nodes; backward() replays adjoints in
/// exact reverse execution order, accumulating additively into shared inputs.
template <typename T>
class Tape {
public:
    int leaf(Tensor<T> v) {
        nodes_.push_back({std::move(v), {}, nullptr});
        return static_cast<int>(nodes_.size()) - 1;
    }

    const Tensor<T>& value(int id) const { return nodes_[id].val; }
    const Tensor<T>& grad(int id) const { return nodes_[id].grad; }
    T scalar(int id) const { return nodes_[id].val.data[0]; }

    // --- convolution: input [Cin,H,W], kernel [Cout,Cin,Kh,Kw], bias [Cout] ---
    int conv2d(int input, int kernel, int bias) {
        const auto& in = nodes_[input].val;
        const auto& k = nodes_[kernel].val;
        const auto& b = nodes_[bias].val;
        if (in.shape.size() != 3 || k.shape.size() != 4)
            throw DimensionError("conv2d: input " + shape_str(in) + " kernel " + shape_str(k));
        int cin = in.shape[0], h = in.shape[1], w = in.shape[2];
        int cout = k.shape[0], kh = k.shape[2], kw = k.shape[3];
        if (k.shape[1] != cin || b.shape != std::vector<int>{cout})
            throw DimensionError("conv2d: input " + shape_str(in) + " kernel " + shape_str(k));
        if (kh % 2 == 0 || kw % 2 == 0) throw DimensionError("conv2d: kernel extents must be odd");

        Tensor<T> out({cout, h, w});
        for (int co = 0; co < cout; ++co)
            std::fill_n(&out.data[plane(co, h, w)], static_cast<size_t>(h) * w, b.data[co]);
        conv_accumulate(in.data.data(), k.data.data(), out.data.data(), cin, cout, h, w, kh, kw,
                        /*mode=*/0);

        int id = push(std::move(out));
        nodes_[id].back = [this, id, input, kernel, bias, cin, cout, h, w, kh, kw] {
            const auto& g = nodes_[id].grad;
            auto& gin = grad_buf(input);
            auto& gk = grad_buf(kernel);
            auto& gb = grad_buf(bias);
            const auto& in = nodes_[input].val;
            const auto& k = nodes_[kernel].val;
            conv_accumulate(g.data.data(), k.data.data(), gin.data.data(), cin, cout, h, w, kh, kw,
                            /*mode=*/1);
            conv_weight_grad(in.data.data(), g.data.data(), gk.data.data(), cin, cout, h, w, kh, kw);
            for (int co = 0; co < cout; ++co) {
                T acc = 0;
                const T* gp = &g.data[plane(co, h, w)];
                for (size_t i = 0; i < static_cast<size_t>(h) * w; ++i) acc += gp[i];
                gb.data[co] += acc;
            }
        };
        return id;
    }

    int maxpool2(int input) {
        const auto& in = nodes_[input].val;
        if (in.shape.size() != 3 || in.shape[1] % 2 || in.shape[2] % 2)
            throw DimensionError("maxpool2: needs [C,H,W] with even H,W, got " + shape_str(in));
        int c = in.shape[0], h = in.shape[1], w = in.shape[2];
        Tensor<T> out({c, h / 2, w / 2});
        auto arg = std::make_shared<std::vector<size_t>>(out.numel());
        for (int ch = 0; ch < c; ++ch)
            for (int y = 0; y < h / 2; ++y)
                for (int x = 0; x < w / 2; ++x) {
                    size_t best = idx3(ch, 2 * y, 2 * x, h, w);
                    // tie rule: first occurrence in row-major scan of the window
                    for (int dy = 0; dy < 2; ++dy)
                        for (int dx = 0; dx < 2; ++dx) {
                            size_t i = idx3(ch, 2 * y + dy, 2 * x + dx, h, w);
                            if (in.data[i] > in.data[best]) best = i;
                        }
                    size_t o = idx3(ch, y, x, h / 2, w / 2);
                    out.data[o] = in.data[best];
                    (*arg)[o] = best;
                }
        int id = push(std::move(out));
        nodes_[id].back = [this, id, input, arg] {
            const auto& g = nodes_[id].grad;
            auto& gin = grad_buf(input);
            for (size_t o = 0; o < g.data.size(); ++o) gin.data[(*arg)[o]] += g.data[o];
        };
        return id;
    }

    int upsample2(int input) {
        const auto& in = nodes_[input].val;
        if (in.shape.size() != 3) throw DimensionError("upsample2: needs [C,H,W], got " + shape_str(in));
        int c = in.shape[0], h = in.shape[1], w = in.shape[2];
        Tensor<T> out({c, 2 * h, 2 * w});
        for (int ch = 0; ch < c; ++ch)
            for (int y = 0; y < 2 * h; ++y)
                for (int x = 0; x < 2 * w; ++x)
                    out.data[idx3(ch, y, x, 2 * h, 2 * w)] = in.data[idx3(ch, y / 2, x / 2, h, w)];
        int id = push(std::move(out));
        nodes_[id].back = [this, id, input, c, h, w] {
            const auto& g = nodes_[id].grad;
            auto& gin = grad_buf(input);
            for (int ch = 0; ch < c; ++ch)
                for (int y = 0; y < 2 * h; ++y)
                    for (int x = 0; x < 2 * w; ++x)
                        gin.data[idx3(ch, y / 2, x / 2, h, w)] += g.data[idx3(ch, y, x, 2 * h, 2 * w)];
        };
        return id;
    }

    /// channel concatenation of two [C,H,W] tensors
    int concat_c(int a, int b) {
        const auto& ta = nodes_[a].val;
        const auto& tb = nodes_[b].val;
        if (ta.shape.size() != 3 || tb.shape.size() != 3 || ta.shape[1] != tb.shape[1] ||
            ta.shape[2] != tb.shape[2])
            throw DimensionError("concat_c: " + shape_str(ta) + " vs " + shape_str(tb));
        Tensor<T> out({ta.shape[0] + tb.shape[0], ta.shape[1], ta.shape[2]});
        std::copy(ta.data.begin(), ta.data.end(), out.data.begin());
        std::copy(tb.data.begin(), tb.data.end(), out.data.begin() + ta.data.size());
        size_t na = ta.data.size();  // before push: it may reallocate nodes_
        int id = push(std::move(out));
        nodes_[id].back = [this, id, a, b, na] {
            const auto& g = nodes_[id].grad;
            auto& ga = grad_buf(a);
            auto& gb = grad_buf(b);
            for (size_t i = 0; i < na; ++i) ga.data[i] += g.data[i];
            for (size_t i = na; i < g.data.size(); ++i) gb.data[i - na] += g.data[i];
        };
        return id;
    }

    int add(int a, int b) {
        const auto& ta = nodes_[a].val;
        const auto& tb = nodes_[b].val;
        if (ta.shape != tb.shape)
            throw DimensionError("add: " + shape_str(ta) + " vs " + shape_str(tb));
        Tensor<T> out = ta;
        for (size_t i = 0; i < out.data.size(); ++i) out.data[i] += tb.data[i];
        int id = push(std::move(out));
        nodes_[id].back = [this, id, a, b] {
            const auto& g = nodes_[id].grad;
            auto& ga = grad_buf(a);
            auto& gb = grad_buf(b);
            for (size_t i = 0; i < g.data.size(); ++i) {
                ga.data[i] += g.data[i];
                gb.data[i] += g.data[i];
            }
        };
        return id;
    }

    int scale(int a, T c) {
        Tensor<T> out = nodes_[a].val;
        for (auto& v : out.data) v *= c;
        int id = push(std::move(out));
        nodes_[id].back = [this, id, a, c] {
            const auto& g = nodes_[id].grad;
            auto& ga = grad_buf(a);
            for (size_t i = 0; i < g.data.size(); ++i) ga.data[i] += c * g.data[i];
        };
        return id;
    }

    int square(int a) {
        Tensor<T> out = nodes_[a].val;
        for (auto& v : out.data) v *= v;
        int id = push(std::move(out));
        nodes_[id].back = [this, id, a] {
            const auto& g = nodes_[id].grad;
            const auto& va = nodes_[a].val;
            auto& ga = grad_buf(a);
            for (size_t i = 0; i < g.data.size(); ++i) ga.data[i] += T(2) * va.data[i] * g.data[i];
        };
        return id;
    }

    int activation(int a, Act kind) {
        const auto& ta = nodes_[a].val;
        Tensor<T> out = ta;
        for (auto& v : out.data) {
            switch (kind) {
                case Act::Swish: v = v * sigmoid(v); break;
                case Act::Relu: v = v > T(0) ? v : T(0); break;
                case Act::Sigmoid: v = sigmoid(v); break;
            }
        }
        int id = push(std::move(out));
        nodes_[id].back = [this, id, a, kind] {
            const auto& g = nodes_[id].grad;
            const auto& x = nodes_[a].val;
            const auto& y = nodes_[id].val;
            auto& ga = grad_buf(a);
            for (size_t i = 0; i < g.data.size(); ++i) {
                T d;
                switch (kind) {
                    case Act::Swish: {
                        T s = sigmoid(x.data[i]);
                        d = s * (T(1) + x.data[i] * (T(1) - s));
                        break;
                    }
                    case Act::Relu: d = x.data[i] > T(0) ? T(1) : T(0); break;
                    case Act::Sigmoid: d = y.data[i] * (T(1) - y.data[i]); break;
                    default: d = T(0);
                }
                ga.data[i] += d * g.data[i];
            }
        };
        return id;
    }

    /// mean binary cross entropy against a constant target; Y clamped to
    /// [eps, 1-eps] (the clamp has zero derivative outside the band)
    int bce(int y, const Tensor<T>& target, T eps) {
        const auto& ty = nodes_[y].val;
        if (ty.shape != target.shape)
            throw DimensionError("bce: " + shape_str(ty) + " vs " + shape_str(target));
        auto x = std::make_shared<Tensor<T>>(target);
        T n = static_cast<T>(ty.data.size());
        T acc = 0;
        for (size_t i = 0; i < ty.data.size(); ++i) {
            T yc = clampv(ty.data[i], eps, T(1) - eps);
            acc -= x->data[i] * std::log(yc) + (T(1) - x->data[i]) * std::log(T(1) - yc);
        }
        int id = push(Tensor<T>({1}, {acc / n}));
        nodes_[id].back = [this, id, y, x, eps, n] {
            T g = nodes_[id].grad.data[0];
            const auto& ty = nodes_[y].val;
            auto& gy = grad_buf(y);
            for (size_t i = 0; i < ty.data.size(); ++i) {
                if (ty.data[i] <= eps || ty.data[i] >= T(1) - eps) continue;
                T yc = ty.data[i];
                gy.data[i] += g / n * (-(x->data[i] / yc) + (T(1) - x->data[i]) / (T(1) - yc));
            }
        };
        return id;
    }

    int mse(int y, const Tensor<T>& target) {
        const auto& ty = nodes_[y].val;
        if (ty.shape != target.shape)
            throw DimensionError("mse: " + shape_str(ty) + " vs " + shape_str(target));
        auto x = std::make_shared<Tensor<T>>(target);
        T n = static_cast<T>(ty.data.size());
        T acc = 0;
        for (size_t i = 0; i < ty.data.size(); ++i) {
            T d = ty.data[i] - x->data[i];
            acc += d * d;
        }
        int id = push(Tensor<T>({1}, {acc / n}));
        nodes_[id].back = [this, id, y, x, n] {
            T g = nodes_[id].grad.data[0];
            const auto& ty = nodes_[y].val;
            auto& gy = grad_buf(y);
            for (size_t i = 0; i < ty.data.size(); ++i)
                gy.data[i] += g * T(2) * (ty.data[i] - x->data[i]) / n;
        };
        return id;
    }

    /// total variation: sum of sqrt(gx^2 + gy^2 + delta^2) with backward
    /// differences; out-of-range differences contribute 0
    int tv(int y, T delta = T(1e-8)) {
        const auto& ty = nodes_[y].val;
        if (ty.shape.size() != 2) throw DimensionError("tv: needs [H,W], got " + shape_str(ty));
        int h = ty.shape[0], w = ty.shape[1];
        T acc = 0;
        for (int i = 0; i < h; ++i)
            for (int j = 0; j < w; ++j) {
                T gx = j > 0 ? ty.data[i * w + j] - ty.data[i * w + j - 1] : T(0);
                T gy = i > 0 ? ty.data[i * w + j] - ty.data[(i - 1) * w + j] : T(0);
                acc += std::sqrt(gx * gx + gy * gy + delta * delta);
            }
        int id = push(Tensor<T>({1}, {acc}));
        nodes_[id].back = [this, id, y, h, w, delta] {
            T g = nodes_[id].grad.data[0];
            const auto& ty = nodes_[y].val;
            auto& gy = grad_buf(y);
            for (int i = 0; i < h; ++i)
                for (int j = 0; j < w; ++j) {
                    T gx = j > 0 ? ty.data[i * w + j] - ty.data[i * w + j - 1] : T(0);
                    T gv = i > 0 ? ty.data[i * w + j] - ty.data[(i - 1) * w + j] : T(0);
                    T s = std::sqrt(gx * gx + gv * gv + delta * delta);
                    if (j > 0) {
                        gy.data[i * w + j] += g * gx / s;
                        gy.data[i * w + j - 1] -= g * gx / s;
                    }
                    if (i > 0) {
                        gy.data[i * w + j] += g * gv / s;
                        gy.data[(i - 1) * w + j] -= g * gv / s;
                    }
                }
        };
        return id;
    }

    /// slice channel c of a [C,H,W] tensor into [H,W]
    int channel(int input, int c) {
        const auto& in = nodes_[input].val;
        if (in.shape.size() != 3 || c < 0 || c >= in.shape[0])
            throw DimensionError("channel: bad slice of " + shape_str(in));
        int h = in.shape[1], w = in.shape[2];
        Tensor<T> out({h, w});
        std::copy_n(&in.data[plane(c, h, w)], static_cast<size_t>(h) * w, out.data.begin());
        int id = push(std::move(out));
        nodes_[id].back = [this, id, input, c, h, w] {
            const auto& g = nodes_[id].grad;
            auto& gin = grad_buf(input);
            T* dst = &gin.data[plane(c, h, w)];
            for (size_t i = 0; i < g.data.size(); ++i) dst[i] += g.data[i];
        };
        return id;
    }

    int sum(int a) {
        const auto& ta = nodes_[a].val;
        T acc = std::accumulate(ta.data.begin(), ta.data.end(), T(0));
        int id = push(Tensor<T>({1}, {acc}));
        nodes_[id].back = [this, id, a] {
            T g = nodes_[id].grad.data[0];
            auto& ga = grad_buf(a);
            for (auto& v : ga.data) v += g;
        };
        return id;
    }

    /// Reverse-mode pass from a scalar node. Gradients of all leaves reachable
    /// from `loss` are afterwards available via grad().
    void backward(int loss) {
        if (nodes_[loss].val.numel() != 1)
            throw ContractError("backward: seed must be scalar");
        for (auto& n : nodes_) n.grad = Tensor<T>();
        grad_buf(loss).data[0] = T(1);
        for (int i = loss; i >= 0; --i)
            if (nodes_[i].back && nodes_[i].grad.numel() != 0) nodes_[i].back();
    }

private:
    struct Node {
        Tensor<T> val;
        Tensor<T> grad;
        std::function<void()> back;
    };
    std::vector<Node> nodes_;

    int push(Tensor<T> v) {
        nodes_.push_back({std::move(v), {}, nullptr});
        return static_cast<int>(nodes_.size()) - 1;
    }

    Tensor<T>& grad_buf(int id) {
        if (nodes_[id].grad.numel() == 0) nodes_[id].grad = Tensor<T>(nodes_[id].val.shape);
        return nodes_[id].grad;
    }

    static T sigmoid(T v) { return T(1) / (T(1) + std::exp(-v)); }
    static T clampv(T v, T lo, T hi) { return v < lo ? lo : (v > hi ? hi : v); }
    static size_t plane(int c, int h, int w) { return static_cast<size_t>(c) * h * w; }
    static size_t idx3(int c, int y, int x, int h, int w) {
        return (static_cast<size_t>(c) * h + y) * w + x;
    }

    // mode 0: out[co] += sum_ci k[co][ci] (*) in[ci]   (forward)
    // mode 1: out[ci] += sum_co k[co][ci] (*T) in[co]  (input adjoint; `in` is grad_out)
    static void conv_accumulate(const T* in, const T* k, T* out, int cin, int cout, int h, int w,
                                int kh, int kw, int mode) {
        int ph = kh / 2, pw = kw / 2;
        for (int co = 0; co < cout; ++co)
            for (int ci = 0; ci < cin; ++ci)
                for (int ky = 0; ky < kh; ++ky)
                    for (int kx = 0; kx < kw; ++kx) {
                        T wv = k[((static_cast<size_t>(co) * cin + ci) * kh + ky) * kw + kx];
                        if (wv == T(0)) continue;
                        int dy = ky - ph, dx = kx - pw;
                        int y0 = std::max(0, -dy), y1 = std::min(h, h - dy);
                        int x0 = std::max(0, -dx), x1 = std::min(w, w - dx);
                        if (x1 <= x0) continue;
                        for (int y = y0; y < y1; ++y) {
                            if (mode == 0) {
                                T* dst = out + (static_cast<size_t>(co) * h + y) * w + x0;
                                const T* src =
                                    in + (static_cast<size_t>(ci) * h + y + dy) * w + x0 + dx;
                                kernels::axpy(dst, src, static_cast<size_t>(x1 - x0), wv);
                            } else {
                                T* dst =
                                    out + (static_cast<size_t>(ci) * h + y + dy) * w + x0 + dx;
                                const T* src = in + (static_cast<size_t>(co) * h + y) * w + x0;
                                kernels::axpy(dst, src, static_cast<size_t>(x1 - x0), wv);
                            }
                        }
                    }
    }

    static void conv_weight_grad(const T* in, const T* gout, T* gk, int cin, int cout, int h,
                                 int w, int kh, int kw) {
        int ph = kh / 2, pw = kw / 2;
        for (int co = 0; co < cout; ++co)
            for (int ci = 0; ci < cin; ++ci)
                for (int ky = 0; ky < kh; ++ky)
                    for (int kx = 0; kx < kw; ++kx) {
                        int dy = ky - ph, dx = kx - pw;
                        int y0 = std::max(0, -dy), y1 = std::min(h, h - dy);
                        int x0 = std::max(0, -dx), x1 = std::min(w, w - dx);
                        if (x1 <= x0) continue;
                        T acc = 0;
                        for (int y = y0; y < y1; ++y) {
                            const T* a = gout + (static_cast<size_t>(co) * h + y) * w + x0;
                            const T* b = in + (static_cast<size_t>(ci) * h + y + dy) * w + x0 + dx;
                            acc += kernels::dot(a, b, static_cast<size_t>(x1 - x0));
                        }
                        gk[((static_cast<size_t>(co) * cin + ci) * kh + ky) * kw + kx] += acc;
                    }
    }
};

/// Central-difference gradient oracle: (f(x+eps e_i) - f(x-eps e_i)) / (2 eps).
template <typename T>
Tensor<T> finite_diff_grad(const std::function<T(const Tensor<T>&)>& f, const Tensor<T>& x, T eps) {
    if (!(eps > T(0))) throw ContractError("finite_diff_grad: eps must be > 0");
    Tensor<T> g(x.shape);
    Tensor<T> probe = x;
    for (size_t i = 0; i < x.data.size(); ++i) {
        probe.data[i] = x.data[i] + eps;
        T fp = f(probe);
        probe.data[i] = x.data[i] - eps;
        T fm = f(probe);
        probe.data[i] = x.data[i];
        g.data[i] = (fp - fm) / (T(2) * eps);
    }
    return g;
}

}  // namespace shadow
