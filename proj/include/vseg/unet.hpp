#pragma once

#include <map>
#include <string>

#include "vseg/checkpoint.hpp"
#include "vseg/layers.hpp"

// Residual U-net with deep supervision: stride-2 conv downsampling, deconv
// upsampling, encoder-to-decoder skip concatenation, one side-output head
// per decoder stage and a learned 1x1 fusion over the concatenated side
// logits. Backward accumulates exact gradients into the parameter store.

namespace vseg {

struct NetConfig {
    int in_channels = 1;
    std::vector<int> enc_channels{16, 32, 64, 128};
    int bottleneck_channels = 256;
    int class_count = 5;
    double dropout_rate = 0.2;
    double bn_eps = 1e-5;
    double bn_momentum = 0.1;

    int stages() const { return int(enc_channels.size()); }

    void validate() const {
        if (in_channels < 1) throw ArgumentError("net: in_channels must be >= 1");
        if (enc_channels.empty()) throw ArgumentError("net: need at least one encoder stage");
        for (int c : enc_channels)
            if (c < 1) throw ArgumentError("net: encoder channels must be >= 1");
        if (bottleneck_channels < 1) throw ArgumentError("net: bottleneck channels must be >= 1");
        if (class_count < 2) throw ArgumentError("net: class count must be >= 2");
        if (dropout_rate < 0 || dropout_rate >= 1)
            throw ArgumentError("net: dropout rate must be in [0,1)");
    }
};

template <typename T>
struct ParamT {
    TensorT<T> value;
    TensorT<T> grad;
    bool decay = false;      // participates in the L2 term
    bool trainable = true;   // running stats are stored but not optimized
};

template <typename T>
class ParamStoreT {
public:
    ParamT<T>& add(const std::string& name, std::vector<int> shape, bool decay, bool trainable) {
        auto [it, fresh] = m_.try_emplace(name);
        if (!fresh) throw ArgumentError("duplicate parameter name: " + name);
        it->second.value = TensorT<T>(shape);
        it->second.grad = TensorT<T>(shape);
        it->second.decay = decay;
        it->second.trainable = trainable;
        return it->second;
    }

    ParamT<T>& at(const std::string& name) {
        auto it = m_.find(name);
        if (it == m_.end()) throw ArgumentError("unknown parameter: " + name);
        return it->second;
    }
    const ParamT<T>& at(const std::string& name) const {
        auto it = m_.find(name);
        if (it == m_.end()) throw ArgumentError("unknown parameter: " + name);
        return it->second;
    }
    bool has(const std::string& name) const { return m_.count(name) != 0; }

    std::map<std::string, ParamT<T>>& entries() { return m_; }
    const std::map<std::string, ParamT<T>>& entries() const { return m_; }

    void zero_grads() {
        for (auto& [name, p] : m_) p.grad.fill(T(0));
    }

private:
    std::map<std::string, ParamT<T>> m_;  // sorted: stable init/serialize order
};

using ParamStore = ParamStoreT<float>;

// He fan-in init for rank-4 kernels, ones for BN scale, zeros elsewhere.
template <typename T>
void init_params(ParamStoreT<T>& ps, std::uint64_t seed) {
    Rng rng(derive_seed(seed, 0x1217u));
    for (auto& [name, p] : ps.entries()) {
        if (p.value.shape.size() == 4 && name.size() > 2 && name.ends_with(".w")) {
            std::size_t fan_in = p.value.size() / std::size_t(p.value.shape[0]);
            double std_dev = std::sqrt(2.0 / double(fan_in));
            for (auto& v : p.value.v) v = T(rng.normal() * std_dev);
        } else if (name.ends_with("gamma") || name.ends_with("rvar")) {
            p.value.fill(T(1));
        } else {
            p.value.fill(T(0));
        }
    }
}

// ---------------------------------------------------------------------------
// Residual block: two Conv-BN-ReLU units, the block input added (through a
// 1x1 conv when channels differ) before the final ReLU, dropout after it.
// ---------------------------------------------------------------------------

template <typename T>
struct ResCtx {
    TensorT<T> x, r1, r2, out;
    BnCtx<T> bn1, bn2;
    TensorT<T> mask;
    bool skip_conv = false;
};

template <typename T>
void register_resblock(ParamStoreT<T>& ps, const std::string& prefix, int cin, int cout) {
    ps.add(prefix + "conv1.w", {cout, cin, 3, 3}, true, true);
    ps.add(prefix + "conv1.b", {cout}, false, true);
    ps.add(prefix + "bn1.gamma", {cout}, false, true);
    ps.add(prefix + "bn1.beta", {cout}, false, true);
    ps.add(prefix + "bn1.rmean", {cout}, false, false);
    ps.add(prefix + "bn1.rvar", {cout}, false, false);
    ps.add(prefix + "conv2.w", {cout, cout, 3, 3}, true, true);
    ps.add(prefix + "conv2.b", {cout}, false, true);
    ps.add(prefix + "bn2.gamma", {cout}, false, true);
    ps.add(prefix + "bn2.beta", {cout}, false, true);
    ps.add(prefix + "bn2.rmean", {cout}, false, false);
    ps.add(prefix + "bn2.rvar", {cout}, false, false);
    if (cin != cout) {
        ps.add(prefix + "skip.w", {cout, cin, 1, 1}, true, true);
        ps.add(prefix + "skip.b", {cout}, false, true);
    }
}

template <typename T>
TensorT<T> bn_apply(ParamStoreT<T>& ps, const std::string& prefix, const TensorT<T>& x, Mode mode,
                    T eps, T momentum, BnCtx<T>& ctx) {
    auto& gamma = ps.at(prefix + "gamma").value;
    auto& beta = ps.at(prefix + "beta").value;
    auto& rmean = ps.at(prefix + "rmean").value;
    auto& rvar = ps.at(prefix + "rvar").value;
    if (mode == Mode::Train)
        return batchnorm_train(x, gamma, beta, rmean, rvar, eps, momentum, ctx);
    return batchnorm_eval(x, gamma, beta, rmean, rvar, eps);
}

template <typename T>
TensorT<T> resblock_forward(ParamStoreT<T>& ps, const std::string& prefix, const TensorT<T>& x,
                            Mode mode, Rng* rng, T dropout_rate, T eps, T momentum,
                            ResCtx<T>& ctx) {
    ctx.x = x;
    ctx.skip_conv = ps.has(prefix + "skip.w");

    TensorT<T> a = conv2d(x, ps.at(prefix + "conv1.w").value, ps.at(prefix + "conv1.b").value, 1, 1);
    a = bn_apply(ps, prefix + "bn1.", a, mode, eps, momentum, ctx.bn1);
    ctx.r1 = relu(a);

    TensorT<T> c = conv2d(ctx.r1, ps.at(prefix + "conv2.w").value, ps.at(prefix + "conv2.b").value,
                          1, 1);
    c = bn_apply(ps, prefix + "bn2.", c, mode, eps, momentum, ctx.bn2);

    TensorT<T> s = ctx.skip_conv
                       ? conv2d(x, ps.at(prefix + "skip.w").value, ps.at(prefix + "skip.b").value,
                                1, 0)
                       : x;
    ctx.r2 = relu(add(c, s));

    if (mode == Mode::Train && dropout_rate > 0) {
        if (!rng) throw ArgumentError("train-mode forward with dropout needs an RNG");
        ctx.out = dropout(ctx.r2, dropout_rate, *rng, ctx.mask);
    } else {
        ctx.mask = TensorT<T>();
        ctx.out = ctx.r2;
    }
    return ctx.out;
}

template <typename T>
TensorT<T> resblock_backward(ParamStoreT<T>& ps, const std::string& prefix, const ResCtx<T>& ctx,
                             const TensorT<T>& gy) {
    TensorT<T> g = dropout_backward(gy, ctx.mask);
    g = relu_backward(g, ctx.r2);

    // branch split: g flows into bn2(conv2(...)) and into the skip path
    TensorT<T> gc;
    batchnorm_backward(g, ps.at(prefix + "bn2.gamma").value, ctx.bn2, gc,
                       ps.at(prefix + "bn2.gamma").grad, ps.at(prefix + "bn2.beta").grad);
    TensorT<T> gr1;
    conv2d_backward(ctx.r1, ps.at(prefix + "conv2.w").value, gc, 1, 1, gr1,
                    ps.at(prefix + "conv2.w").grad, ps.at(prefix + "conv2.b").grad);
    gr1 = relu_backward(gr1, ctx.r1);
    TensorT<T> gb1;
    batchnorm_backward(gr1, ps.at(prefix + "bn1.gamma").value, ctx.bn1, gb1,
                       ps.at(prefix + "bn1.gamma").grad, ps.at(prefix + "bn1.beta").grad);
    TensorT<T> gx;
    conv2d_backward(ctx.x, ps.at(prefix + "conv1.w").value, gb1, 1, 1, gx,
                    ps.at(prefix + "conv1.w").grad, ps.at(prefix + "conv1.b").grad);

    if (ctx.skip_conv) {
        TensorT<T> gxs;
        conv2d_backward(ctx.x, ps.at(prefix + "skip.w").value, g, 1, 0, gxs,
                        ps.at(prefix + "skip.w").grad, ps.at(prefix + "skip.b").grad);
        return add(gx, gxs);
    }
    return add(gx, g);
}

// ---------------------------------------------------------------------------
// Full network
// ---------------------------------------------------------------------------

template <typename T>
struct SideOutputSetT {
    std::vector<TensorT<T>> sides;  // deepest decoder stage first
    TensorT<T> fused;
};

using SideOutputSet = SideOutputSetT<float>;

template <typename T>
class UNetT {
public:
    NetConfig cfg;
    ParamStoreT<T> params;

    explicit UNetT(NetConfig config) : cfg(std::move(config)) {
        cfg.validate();
        const int n = cfg.stages();
        for (int i = 0; i < n; ++i) {
            int cin = i == 0 ? cfg.in_channels : cfg.enc_channels[i];
            int cout = cfg.enc_channels[i];
            int cnext = i + 1 < n ? cfg.enc_channels[i + 1] : cfg.bottleneck_channels;
            std::string p = "enc" + std::to_string(i) + ".";
            register_resblock(params, p, cin, cout);
            params.add(p + "down.w", {cnext, cout, 3, 3}, true, true);
            params.add(p + "down.b", {cnext}, false, true);
            params.add(p + "dbn.gamma", {cnext}, false, true);
            params.add(p + "dbn.beta", {cnext}, false, true);
            params.add(p + "dbn.rmean", {cnext}, false, false);
            params.add(p + "dbn.rvar", {cnext}, false, false);
        }
        register_resblock(params, "bott.", cfg.bottleneck_channels, cfg.bottleneck_channels);
        for (int i = 0; i < n; ++i) {
            int cup = i + 1 < n ? cfg.enc_channels[i + 1] : cfg.bottleneck_channels;
            int c = cfg.enc_channels[i];
            std::string p = "dec" + std::to_string(i) + ".";
            params.add(p + "up.w", {cup, c, 2, 2}, true, true);  // deconv kernel (Cin,Cout,k,k)
            params.add(p + "up.b", {c}, false, true);
            params.add(p + "ubn.gamma", {c}, false, true);
            params.add(p + "ubn.beta", {c}, false, true);
            params.add(p + "ubn.rmean", {c}, false, false);
            params.add(p + "ubn.rvar", {c}, false, false);
            register_resblock(params, p, 2 * c, c);
            params.add("head" + std::to_string(i) + ".w", {cfg.class_count, c, 1, 1}, true, true);
            params.add("head" + std::to_string(i) + ".b", {cfg.class_count}, false, true);
        }
        params.add("fuse.w", {cfg.class_count, n * cfg.class_count, 1, 1}, true, true);
        params.add("fuse.b", {cfg.class_count}, false, true);
    }

    void init(std::uint64_t seed) { init_params(params, seed); }

    SideOutputSetT<T> forward(const TensorT<T>& x, Mode mode, Rng* rng = nullptr) {
        const int n = cfg.stages();
        if (x.shape.size() != 4 || x.shape[1] != cfg.in_channels)
            throw ShapeError("unet: expected input (B," + std::to_string(cfg.in_channels) +
                             ",H,W), got " + x.shape_str());
        const int h = x.shape[2], w = x.shape[3];
        const int div = 1 << n;
        if (h % div != 0 || w % div != 0 || h / div < 1 || w / div < 1)
            throw ShapeError("unet: spatial dims must be positive multiples of " +
                             std::to_string(div) + ", got " + x.shape_str());

        const T eps = T(cfg.bn_eps), mom = T(cfg.bn_momentum), rate = T(cfg.dropout_rate);
        enc_ctx_.assign(n, {});
        down_ctx_.assign(n, {});
        up_ctx_.assign(n, {});
        dec_out_.assign(n, {});

        TensorT<T> cur = x;
        for (int i = 0; i < n; ++i) {
            std::string p = "enc" + std::to_string(i) + ".";
            TensorT<T> s = resblock_forward(params, p, cur, mode, rng, rate, eps, mom, enc_ctx_[i]);
            down_ctx_[i].in = s;
            TensorT<T> d = conv2d(s, params.at(p + "down.w").value, params.at(p + "down.b").value,
                                  2, 1);
            d = bn_apply(params, p + "dbn.", d, mode, eps, mom, down_ctx_[i].bn);
            down_ctx_[i].rout = relu(d);
            cur = down_ctx_[i].rout;
        }

        cur = resblock_forward(params, "bott.", cur, mode, rng, rate, eps, mom, bott_ctx_);

        for (int i = n - 1; i >= 0; --i) {
            std::string p = "dec" + std::to_string(i) + ".";
            up_ctx_[i].in = cur;
            TensorT<T> u = deconv2d(cur, params.at(p + "up.w").value, params.at(p + "up.b").value,
                                    2);
            u = bn_apply(params, p + "ubn.", u, mode, eps, mom, up_ctx_[i].bn);
            up_ctx_[i].rout = relu(u);
            up_ctx_[i].cat = concat_channels<T>({&up_ctx_[i].rout, &enc_ctx_[i].out});
            dec_out_[i] = resblock_forward(params, p, up_ctx_[i].cat, mode, rng, rate, eps, mom,
                                           up_ctx_[i].block);
            cur = dec_out_[i];
        }

        SideOutputSetT<T> outs;
        std::vector<TensorT<T>> ups;
        for (int i = n - 1; i >= 0; --i) {  // deepest first
            std::string hp = "head" + std::to_string(i);
            TensorT<T> logit = conv2d(dec_out_[i], params.at(hp + ".w").value,
                                      params.at(hp + ".b").value, 1, 0);
            ups.push_back(bilinear_resize(logit, h, w));
            outs.sides.push_back(softmax_channel(ups.back()));
        }
        std::vector<const TensorT<T>*> parts;
        for (const auto& u : ups) parts.push_back(&u);
        fuse_cat_ = concat_channels<T>(parts);
        TensorT<T> fl = conv2d(fuse_cat_, params.at("fuse.w").value, params.at("fuse.b").value, 1,
                               0);
        outs.fused = softmax_channel(fl);
        return outs;
    }

    // Hash of all ReLU on/off patterns from the last forward pass. Two
    // forwards with equal hashes lie on the same smooth piece of the loss
    // surface, which is the validity condition for finite-difference checks.
    std::uint64_t activation_sign_hash() const {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        auto feed = [&h](const TensorT<T>& t) {
            for (auto v : t.v) {
                h ^= (v > T(0)) ? 0x9du : 0x31u;
                h *= 0x100000001b3ULL;
            }
        };
        for (const auto& c : enc_ctx_) {
            feed(c.r1);
            feed(c.r2);
        }
        for (const auto& c : down_ctx_) feed(c.rout);
        feed(bott_ctx_.r1);
        feed(bott_ctx_.r2);
        for (const auto& c : up_ctx_) {
            feed(c.rout);
            feed(c.block.r1);
            feed(c.block.r2);
        }
        return h;
    }

    // d_sides / d_fused are gradients w.r.t. the post-softmax probability
    // maps of the SideOutputSet returned by the matching forward call.
    void backward(const SideOutputSetT<T>& outs, const std::vector<TensorT<T>>& d_sides,
                  const TensorT<T>& d_fused) {
        const int n = cfg.stages();
        if (int(d_sides.size()) != n)
            throw ShapeError("unet backward: expected " + std::to_string(n) + " side gradients");

        TensorT<T> gfl = softmax_channel_backward(d_fused, outs.fused);
        TensorT<T> gcat;
        conv2d_backward(fuse_cat_, params.at("fuse.w").value, gfl, 1, 0, gcat,
                        params.at("fuse.w").grad, params.at("fuse.b").grad);
        std::vector<int> chunk(n, cfg.class_count);
        std::vector<TensorT<T>> gups = split_channels(gcat, chunk);

        std::vector<TensorT<T>> g_dec(n);
        for (int j = 0; j < n; ++j) {
            int i = n - 1 - j;
            TensorT<T> gup = add(gups[j], softmax_channel_backward(d_sides[j], outs.sides[j]));
            TensorT<T> glogit =
                bilinear_resize_backward(gup, dec_out_[i].shape[2], dec_out_[i].shape[3]);
            std::string hp = "head" + std::to_string(i);
            TensorT<T> gd;
            conv2d_backward(dec_out_[i], params.at(hp + ".w").value, glogit, 1, 0, gd,
                            params.at(hp + ".w").grad, params.at(hp + ".b").grad);
            g_dec[i] = std::move(gd);
        }

        std::vector<TensorT<T>> g_skip(n);
        TensorT<T> g_deeper;
        for (int i = 0; i < n; ++i) {
            std::string p = "dec" + std::to_string(i) + ".";
            TensorT<T> g = std::move(g_dec[i]);
            if (i > 0) g = add(g, g_deeper);

            TensorT<T> gc = resblock_backward(params, p, up_ctx_[i].block, g);
            int c = cfg.enc_channels[i];
            auto parts = split_channels(gc, {c, c});
            g_skip[i] = std::move(parts[1]);

            TensorT<T> gu = relu_backward(parts[0], up_ctx_[i].rout);
            TensorT<T> gub;
            batchnorm_backward(gu, params.at(p + "ubn.gamma").value, up_ctx_[i].bn, gub,
                               params.at(p + "ubn.gamma").grad, params.at(p + "ubn.beta").grad);
            deconv2d_backward(up_ctx_[i].in, params.at(p + "up.w").value, gub, 2, g_deeper,
                              params.at(p + "up.w").grad, params.at(p + "up.b").grad);
        }

        TensorT<T> gin = resblock_backward(params, "bott.", bott_ctx_, g_deeper);

        for (int i = n - 1; i >= 0; --i) {
            std::string p = "enc" + std::to_string(i) + ".";
            TensorT<T> g = relu_backward(gin, down_ctx_[i].rout);
            TensorT<T> gb;
            batchnorm_backward(g, params.at(p + "dbn.gamma").value, down_ctx_[i].bn, gb,
                               params.at(p + "dbn.gamma").grad, params.at(p + "dbn.beta").grad);
            TensorT<T> gs;
            conv2d_backward(down_ctx_[i].in, params.at(p + "down.w").value, gb, 2, 1, gs,
                            params.at(p + "down.w").grad, params.at(p + "down.b").grad);
            gs = add(gs, g_skip[i]);
            gin = resblock_backward(params, p, enc_ctx_[i], gs);
        }
    }

private:
    struct DownCtx {
        TensorT<T> in, rout;
        BnCtx<T> bn;
    };
    struct UpCtx {
        TensorT<T> in, rout, cat;
        BnCtx<T> bn;
        ResCtx<T> block;
    };

    std::vector<ResCtx<T>> enc_ctx_;
    std::vector<DownCtx> down_ctx_;
    ResCtx<T> bott_ctx_;
    std::vector<UpCtx> up_ctx_;
    std::vector<TensorT<T>> dec_out_;
    TensorT<T> fuse_cat_;
};

using UNet = UNetT<float>;

// ---------------------------------------------------------------------------
// Checkpoint bridge
// ---------------------------------------------------------------------------

template <typename T>
Checkpoint params_to_checkpoint(const ParamStoreT<T>& ps, std::uint32_t epoch,
                                const std::string& digest) {
    Checkpoint ckpt;
    ckpt.epoch = epoch;
    ckpt.config_digest = digest;
    for (const auto& [name, p] : ps.entries()) {
        TensorBlob blob;
        for (int d : p.value.shape) blob.shape.push_back(std::uint32_t(d));
        blob.values.reserve(p.value.size());
        for (auto v : p.value.v) blob.values.push_back(float(v));
        ckpt.tensors.emplace(name, std::move(blob));
    }
    return ckpt;
}

template <typename T>
void load_params(ParamStoreT<T>& ps, const Checkpoint& ckpt) {
    for (auto& [name, p] : ps.entries()) {
        auto it = ckpt.tensors.find(name);
        if (it == ckpt.tensors.end())
            throw FormatError("checkpoint is missing parameter: " + name);
        if (it->second.values.size() != p.value.size())
            throw ShapeError("checkpoint parameter '" + name + "' has wrong element count");
        for (std::size_t i = 0; i < p.value.v.size(); ++i)
            p.value.v[i] = T(it->second.values[i]);
    }
}

}  // namespace vseg
