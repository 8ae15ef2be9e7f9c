#pragma once

#include <cmath>
#include <vector>

#include "vseg/common.hpp"
#include "vseg/gemm.hpp"
#include "vseg/tensor.hpp"

// Differentiable primitives on (B,C,H,W) tensors. Convolutions run as
// im2col + GEMM; every backward produces exact analytic gradients (the
// finite-difference suites hold them to that).

namespace vseg {

enum class Mode { Train, Eval };

namespace detail {

template <typename T>
std::vector<T>& scratch(int slot) {
    thread_local std::vector<T> bufs[4];
    return bufs[slot];
}

// col is (C*k*k) x (Ho*Wo); col[r][o] = x[ci, oh*s+ki-p, ow*s+kj-p] with
// r = (ci*k+ki)*k+kj and o = oh*Wo+ow; out-of-bounds reads are zero.
template <typename T>
void im2col(const T* x, int c, int h, int w, int k, int stride, int pad, int ho, int wo, T* col) {
    for (int ci = 0; ci < c; ++ci) {
        for (int ki = 0; ki < k; ++ki) {
            for (int kj = 0; kj < k; ++kj) {
                T* dst = col + ((std::size_t(ci) * k + ki) * k + kj) * (std::size_t(ho) * wo);
                const T* src = x + std::size_t(ci) * h * w;
                for (int oh = 0; oh < ho; ++oh) {
                    int iy = oh * stride + ki - pad;
                    if (iy < 0 || iy >= h) {
                        for (int ow = 0; ow < wo; ++ow) *dst++ = T(0);
                        continue;
                    }
                    for (int ow = 0; ow < wo; ++ow) {
                        int ix = ow * stride + kj - pad;
                        *dst++ = (ix >= 0 && ix < w) ? src[std::size_t(iy) * w + ix] : T(0);
                    }
                }
            }
        }
    }
}

// Adjoint of im2col: scatter-add columns back into the (C,H,W) image.
template <typename T>
void col2im_add(const T* col, int c, int h, int w, int k, int stride, int pad, int ho, int wo,
                T* x) {
    for (int ci = 0; ci < c; ++ci) {
        for (int ki = 0; ki < k; ++ki) {
            for (int kj = 0; kj < k; ++kj) {
                const T* src = col + ((std::size_t(ci) * k + ki) * k + kj) * (std::size_t(ho) * wo);
                T* dst = x + std::size_t(ci) * h * w;
                for (int oh = 0; oh < ho; ++oh) {
                    int iy = oh * stride + ki - pad;
                    if (iy < 0 || iy >= h) {
                        src += wo;
                        continue;
                    }
                    for (int ow = 0; ow < wo; ++ow) {
                        int ix = ow * stride + kj - pad;
                        if (ix >= 0 && ix < w) dst[std::size_t(iy) * w + ix] += *src;
                        ++src;
                    }
                }
            }
        }
    }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// conv2d: cross-correlation, kernel (Cout, Cin, k, k), square kernels.
// ---------------------------------------------------------------------------

template <typename T>
TensorT<T> conv2d(const TensorT<T>& x, const TensorT<T>& w, const TensorT<T>& b, int stride,
                  int pad) {
    if (x.shape.size() != 4 || w.shape.size() != 4)
        throw ShapeError("conv2d: need rank-4 input and kernel");
    if (w.shape[1] != x.shape[1])
        throw ShapeError("conv2d: kernel input channels " + w.shape_str() +
                         " do not match input " + x.shape_str());
    const int bs = x.shape[0], c = x.shape[1], h = x.shape[2], wd = x.shape[3];
    const int co = w.shape[0], k = w.shape[2];
    const int ho = (h + 2 * pad - k) / stride + 1;
    const int wo = (wd + 2 * pad - k) / stride + 1;
    if (ho <= 0 || wo <= 0) throw ShapeError("conv2d: kernel larger than padded input");

    TensorT<T> y({bs, co, ho, wo});
    const std::size_t kk = std::size_t(c) * k * k;
    const std::size_t l = std::size_t(ho) * wo;
    const bool direct = (k == 1 && stride == 1 && pad == 0);
    auto& col = detail::scratch<T>(0);
    if (!direct) col.resize(kk * l);

    for (int bi = 0; bi < bs; ++bi) {
        const T* xb = x.data() + std::size_t(bi) * c * h * wd;
        const T* cols = xb;
        if (!direct) {
            detail::im2col(xb, c, h, wd, k, stride, pad, ho, wo, col.data());
            cols = col.data();
        }
        gemm(false, false, co, int(l), int(kk), T(1), w.data(), int(kk), cols, int(l), T(0),
             y.data() + std::size_t(bi) * co * l, int(l));
    }
    for (int bi = 0; bi < bs; ++bi)
        for (int ci = 0; ci < co; ++ci) {
            T* yp = y.data() + (std::size_t(bi) * co + ci) * l;
            T bias = b.v[ci];
            for (std::size_t i = 0; i < l; ++i) yp[i] += bias;
        }
    return y;
}

// gx is overwritten; gw and gb are accumulated into.
template <typename T>
void conv2d_backward(const TensorT<T>& x, const TensorT<T>& w, const TensorT<T>& gy, int stride,
                     int pad, TensorT<T>& gx, TensorT<T>& gw, TensorT<T>& gb) {
    const int bs = x.shape[0], c = x.shape[1], h = x.shape[2], wd = x.shape[3];
    const int co = w.shape[0], k = w.shape[2];
    const int ho = gy.shape[2], wo = gy.shape[3];
    const std::size_t kk = std::size_t(c) * k * k;
    const std::size_t l = std::size_t(ho) * wo;
    const bool direct = (k == 1 && stride == 1 && pad == 0);

    gx = TensorT<T>(x.shape);
    auto& col = detail::scratch<T>(0);
    auto& gcol = detail::scratch<T>(1);
    if (!direct) {
        col.resize(kk * l);
        gcol.resize(kk * l);
    }

    for (int bi = 0; bi < bs; ++bi) {
        const T* xb = x.data() + std::size_t(bi) * c * h * wd;
        const T* gyb = gy.data() + std::size_t(bi) * co * l;
        T* gxb = gx.data() + std::size_t(bi) * c * h * wd;

        const T* cols = xb;
        if (!direct) {
            detail::im2col(xb, c, h, wd, k, stride, pad, ho, wo, col.data());
            cols = col.data();
        }
        // dW += gy . cols^T
        gemm(false, true, co, int(kk), int(l), T(1), gyb, int(l), cols, int(l), T(1), gw.data(),
             int(kk));
        // dcols = W^T . gy
        T* gcols = direct ? gxb : gcol.data();
        gemm(true, false, int(kk), int(l), co, T(1), w.data(), int(kk), gyb, int(l), T(0), gcols,
             int(l));
        if (!direct) detail::col2im_add(gcols, c, h, wd, k, stride, pad, ho, wo, gxb);

        for (int ci = 0; ci < co; ++ci) {
            const T* g = gyb + std::size_t(ci) * l;
            T s = T(0);
            for (std::size_t i = 0; i < l; ++i) s += g[i];
            gb.v[ci] += s;
        }
    }
}

// ---------------------------------------------------------------------------
// deconv2d: transposed convolution, kernel (Cin, Cout, k, k), pad 0.
// Output spatial size = (in - 1) * stride + k.
// ---------------------------------------------------------------------------

template <typename T>
TensorT<T> deconv2d(const TensorT<T>& x, const TensorT<T>& w, const TensorT<T>& b, int stride) {
    if (x.shape.size() != 4 || w.shape.size() != 4)
        throw ShapeError("deconv2d: need rank-4 input and kernel");
    if (w.shape[0] != x.shape[1])
        throw ShapeError("deconv2d: kernel input channels " + w.shape_str() +
                         " do not match input " + x.shape_str());
    const int bs = x.shape[0], c = x.shape[1], h = x.shape[2], wd = x.shape[3];
    const int co = w.shape[1], k = w.shape[2];
    const int ho = (h - 1) * stride + k;
    const int wo = (wd - 1) * stride + k;

    TensorT<T> y({bs, co, ho, wo});
    const std::size_t kk = std::size_t(co) * k * k;
    const std::size_t l = std::size_t(h) * wd;
    auto& tmp = detail::scratch<T>(0);
    tmp.resize(kk * l);

    for (int bi = 0; bi < bs; ++bi) {
        const T* xb = x.data() + std::size_t(bi) * c * l;
        T* yb = y.data() + std::size_t(bi) * co * ho * wo;
        // tmp = W^T . x   with W viewed as (Cin x Cout*k*k)
        gemm(true, false, int(kk), int(l), c, T(1), w.data(), int(kk), xb, int(l), T(0),
             tmp.data(), int(l));
        detail::col2im_add(tmp.data(), co, ho, wo, k, stride, 0, h, wd, yb);
        for (int ci = 0; ci < co; ++ci) {
            T* yp = yb + std::size_t(ci) * ho * wo;
            T bias = b.v[ci];
            for (std::size_t i = 0; i < std::size_t(ho) * wo; ++i) yp[i] += bias;
        }
    }
    return y;
}

template <typename T>
void deconv2d_backward(const TensorT<T>& x, const TensorT<T>& w, const TensorT<T>& gy, int stride,
                       TensorT<T>& gx, TensorT<T>& gw, TensorT<T>& gb) {
    const int bs = x.shape[0], c = x.shape[1], h = x.shape[2], wd = x.shape[3];
    const int co = w.shape[1], k = w.shape[2];
    const int ho = gy.shape[2], wo = gy.shape[3];
    const std::size_t kk = std::size_t(co) * k * k;
    const std::size_t l = std::size_t(h) * wd;

    gx = TensorT<T>(x.shape);
    auto& gtmp = detail::scratch<T>(0);
    gtmp.resize(kk * l);

    for (int bi = 0; bi < bs; ++bi) {
        const T* xb = x.data() + std::size_t(bi) * c * l;
        const T* gyb = gy.data() + std::size_t(bi) * co * ho * wo;
        T* gxb = gx.data() + std::size_t(bi) * c * l;

        detail::im2col(gyb, co, ho, wo, k, stride, 0, h, wd, gtmp.data());
        // dx = W . gtmp
        gemm(false, false, c, int(l), int(kk), T(1), w.data(), int(kk), gtmp.data(), int(l), T(0),
             gxb, int(l));
        // dW += x . gtmp^T
        gemm(false, true, c, int(kk), int(l), T(1), xb, int(l), gtmp.data(), int(l), T(1),
             gw.data(), int(kk));

        for (int ci = 0; ci < co; ++ci) {
            const T* g = gyb + std::size_t(ci) * ho * wo;
            T s = T(0);
            for (std::size_t i = 0; i < std::size_t(ho) * wo; ++i) s += g[i];
            gb.v[ci] += s;
        }
    }
}

// ---------------------------------------------------------------------------
// BatchNorm over (B,H,W) per channel.
// ---------------------------------------------------------------------------

template <typename T>
struct BnCtx {
    TensorT<T> xhat;
    std::vector<T> inv_std;
    std::size_t n = 0;  // B*H*W
};

template <typename T>
TensorT<T> batchnorm_train(const TensorT<T>& x, const TensorT<T>& gamma, const TensorT<T>& beta,
                           TensorT<T>& running_mean, TensorT<T>& running_var, T eps, T momentum,
                           BnCtx<T>& ctx) {
    const int bs = x.shape[0], c = x.shape[1];
    const std::size_t hw = std::size_t(x.shape[2]) * x.shape[3];
    const std::size_t n = std::size_t(bs) * hw;

    ctx.xhat = TensorT<T>(x.shape);
    ctx.inv_std.assign(c, T(0));
    ctx.n = n;

    TensorT<T> y(x.shape);
    for (int ci = 0; ci < c; ++ci) {
        T mean = T(0);
        for (int bi = 0; bi < bs; ++bi) {
            const T* xp = x.data() + (std::size_t(bi) * c + ci) * hw;
            for (std::size_t i = 0; i < hw; ++i) mean += xp[i];
        }
        mean /= T(n);
        T var = T(0);
        for (int bi = 0; bi < bs; ++bi) {
            const T* xp = x.data() + (std::size_t(bi) * c + ci) * hw;
            for (std::size_t i = 0; i < hw; ++i) {
                T d = xp[i] - mean;
                var += d * d;
            }
        }
        var /= T(n);  // biased, used for normalization
        T inv = T(1) / std::sqrt(var + eps);
        ctx.inv_std[ci] = inv;

        T g = gamma.v[ci], bt = beta.v[ci];
        for (int bi = 0; bi < bs; ++bi) {
            const T* xp = x.data() + (std::size_t(bi) * c + ci) * hw;
            T* xh = ctx.xhat.data() + (std::size_t(bi) * c + ci) * hw;
            T* yp = y.data() + (std::size_t(bi) * c + ci) * hw;
            for (std::size_t i = 0; i < hw; ++i) {
                xh[i] = (xp[i] - mean) * inv;
                yp[i] = g * xh[i] + bt;
            }
        }

        T unbiased = n > 1 ? var * T(n) / T(n - 1) : var;
        running_mean.v[ci] = (T(1) - momentum) * running_mean.v[ci] + momentum * mean;
        running_var.v[ci] = (T(1) - momentum) * running_var.v[ci] + momentum * unbiased;
    }
    return y;
}

template <typename T>
TensorT<T> batchnorm_eval(const TensorT<T>& x, const TensorT<T>& gamma, const TensorT<T>& beta,
                          const TensorT<T>& running_mean, const TensorT<T>& running_var, T eps) {
    const int bs = x.shape[0], c = x.shape[1];
    const std::size_t hw = std::size_t(x.shape[2]) * x.shape[3];
    TensorT<T> y(x.shape);
    for (int ci = 0; ci < c; ++ci) {
        T inv = T(1) / std::sqrt(running_var.v[ci] + eps);
        T g = gamma.v[ci] * inv;
        T b = beta.v[ci] - gamma.v[ci] * running_mean.v[ci] * inv;
        for (int bi = 0; bi < bs; ++bi) {
            const T* xp = x.data() + (std::size_t(bi) * c + ci) * hw;
            T* yp = y.data() + (std::size_t(bi) * c + ci) * hw;
            for (std::size_t i = 0; i < hw; ++i) yp[i] = g * xp[i] + b;
        }
    }
    return y;
}

template <typename T>
void batchnorm_backward(const TensorT<T>& gy, const TensorT<T>& gamma, const BnCtx<T>& ctx,
                        TensorT<T>& gx, TensorT<T>& ggamma, TensorT<T>& gbeta) {
    if (ctx.n == 0)
        throw ArgumentError("batchnorm backward needs a preceding train-mode forward");
    const int bs = gy.shape[0], c = gy.shape[1];
    const std::size_t hw = std::size_t(gy.shape[2]) * gy.shape[3];
    const T n = T(ctx.n);

    gx = TensorT<T>(gy.shape);
    for (int ci = 0; ci < c; ++ci) {
        T sum_gy = T(0), sum_gy_xhat = T(0);
        for (int bi = 0; bi < bs; ++bi) {
            const T* g = gy.data() + (std::size_t(bi) * c + ci) * hw;
            const T* xh = ctx.xhat.data() + (std::size_t(bi) * c + ci) * hw;
            for (std::size_t i = 0; i < hw; ++i) {
                sum_gy += g[i];
                sum_gy_xhat += g[i] * xh[i];
            }
        }
        ggamma.v[ci] += sum_gy_xhat;
        gbeta.v[ci] += sum_gy;

        T gsc = gamma.v[ci] * ctx.inv_std[ci];
        T mean_gy = sum_gy / n;
        T mean_gy_xhat = sum_gy_xhat / n;
        for (int bi = 0; bi < bs; ++bi) {
            const T* g = gy.data() + (std::size_t(bi) * c + ci) * hw;
            const T* xh = ctx.xhat.data() + (std::size_t(bi) * c + ci) * hw;
            T* gxp = gx.data() + (std::size_t(bi) * c + ci) * hw;
            for (std::size_t i = 0; i < hw; ++i)
                gxp[i] = gsc * (g[i] - mean_gy - xh[i] * mean_gy_xhat);
        }
    }
}

// ---------------------------------------------------------------------------
// ReLU / Dropout / residual add
// ---------------------------------------------------------------------------

template <typename T>
TensorT<T> relu(const TensorT<T>& x) {
    TensorT<T> y = x;
    for (auto& v : y.v)
        if (v < T(0)) v = T(0);
    return y;
}

// Backward via the stored output: grad passes where y > 0.
template <typename T>
TensorT<T> relu_backward(const TensorT<T>& gy, const TensorT<T>& y) {
    TensorT<T> gx = gy;
    for (std::size_t i = 0; i < gx.v.size(); ++i)
        if (!(y.v[i] > T(0))) gx.v[i] = T(0);
    return gx;
}

// Inverted dropout: kept units scale by 1/(1-rate), eval is a no-op.
template <typename T>
TensorT<T> dropout(const TensorT<T>& x, T rate, Rng& rng, TensorT<T>& mask) {
    if (!(rate > T(0))) {
        mask = TensorT<T>();
        return x;
    }
    if (rate >= T(1)) throw ArgumentError("dropout rate must be < 1");
    mask = TensorT<T>(x.shape);
    T keep = T(1) / (T(1) - rate);
    TensorT<T> y(x.shape);
    for (std::size_t i = 0; i < x.v.size(); ++i) {
        T m = rng.uniform01() < double(rate) ? T(0) : keep;
        mask.v[i] = m;
        y.v[i] = x.v[i] * m;
    }
    return y;
}

template <typename T>
TensorT<T> dropout_backward(const TensorT<T>& gy, const TensorT<T>& mask) {
    if (mask.v.empty()) return gy;
    TensorT<T> gx = gy;
    for (std::size_t i = 0; i < gx.v.size(); ++i) gx.v[i] *= mask.v[i];
    return gx;
}

template <typename T>
TensorT<T> add(const TensorT<T>& a, const TensorT<T>& b) {
    check_same_shape(a, b, "add");
    TensorT<T> y = a;
    for (std::size_t i = 0; i < y.v.size(); ++i) y.v[i] += b.v[i];
    return y;
}

// ---------------------------------------------------------------------------
// Bilinear resize (align_corners = false) and channel softmax.
// ---------------------------------------------------------------------------

template <typename T>
TensorT<T> bilinear_resize(const TensorT<T>& x, int out_h, int out_w) {
    const int bs = x.shape[0], c = x.shape[1], h = x.shape[2], w = x.shape[3];
    TensorT<T> y({bs, c, out_h, out_w});
    const double sy = double(h) / out_h, sx = double(w) / out_w;
    for (int oy = 0; oy < out_h; ++oy) {
        double fy = (oy + 0.5) * sy - 0.5;
        int y0 = int(std::floor(fy));
        double wy = fy - y0;
        int y0c = std::clamp(y0, 0, h - 1), y1c = std::clamp(y0 + 1, 0, h - 1);
        for (int ox = 0; ox < out_w; ++ox) {
            double fx = (ox + 0.5) * sx - 0.5;
            int x0 = int(std::floor(fx));
            double wx = fx - x0;
            int x0c = std::clamp(x0, 0, w - 1), x1c = std::clamp(x0 + 1, 0, w - 1);
            for (int bi = 0; bi < bs; ++bi)
                for (int ci = 0; ci < c; ++ci) {
                    const T* xp = x.data() + (std::size_t(bi) * c + ci) * h * w;
                    double top = double(xp[std::size_t(y0c) * w + x0c]) * (1 - wx) +
                                 double(xp[std::size_t(y0c) * w + x1c]) * wx;
                    double bot = double(xp[std::size_t(y1c) * w + x0c]) * (1 - wx) +
                                 double(xp[std::size_t(y1c) * w + x1c]) * wx;
                    y.at(bi, ci, oy, ox) = T(top * (1 - wy) + bot * wy);
                }
        }
    }
    return y;
}

template <typename T>
TensorT<T> bilinear_resize_backward(const TensorT<T>& gy, int in_h, int in_w) {
    const int bs = gy.shape[0], c = gy.shape[1], out_h = gy.shape[2], out_w = gy.shape[3];
    TensorT<T> gx({bs, c, in_h, in_w});
    const double sy = double(in_h) / out_h, sx = double(in_w) / out_w;
    for (int oy = 0; oy < out_h; ++oy) {
        double fy = (oy + 0.5) * sy - 0.5;
        int y0 = int(std::floor(fy));
        double wy = fy - y0;
        int y0c = std::clamp(y0, 0, in_h - 1), y1c = std::clamp(y0 + 1, 0, in_h - 1);
        for (int ox = 0; ox < out_w; ++ox) {
            double fx = (ox + 0.5) * sx - 0.5;
            int x0 = int(std::floor(fx));
            double wx = fx - x0;
            int x0c = std::clamp(x0, 0, in_w - 1), x1c = std::clamp(x0 + 1, 0, in_w - 1);
            for (int bi = 0; bi < bs; ++bi)
                for (int ci = 0; ci < c; ++ci) {
                    T* gxp = gx.data() + (std::size_t(bi) * c + ci) * in_h * in_w;
                    T g = gy.at(bi, ci, oy, ox);
                    gxp[std::size_t(y0c) * in_w + x0c] += T(g * (1 - wx) * (1 - wy));
                    gxp[std::size_t(y0c) * in_w + x1c] += T(g * wx * (1 - wy));
                    gxp[std::size_t(y1c) * in_w + x0c] += T(g * (1 - wx) * wy);
                    gxp[std::size_t(y1c) * in_w + x1c] += T(g * wx * wy);
                }
        }
    }
    return gx;
}

template <typename T>
TensorT<T> softmax_channel(const TensorT<T>& x) {
    const int bs = x.shape[0], c = x.shape[1];
    const std::size_t hw = std::size_t(x.shape[2]) * x.shape[3];
    TensorT<T> y(x.shape);
    for (int bi = 0; bi < bs; ++bi) {
        const T* xb = x.data() + std::size_t(bi) * c * hw;
        T* yb = y.data() + std::size_t(bi) * c * hw;
        for (std::size_t i = 0; i < hw; ++i) {
            T m = xb[i];
            for (int ci = 1; ci < c; ++ci) m = std::max(m, xb[std::size_t(ci) * hw + i]);
            T sum = T(0);
            for (int ci = 0; ci < c; ++ci) {
                T e = std::exp(xb[std::size_t(ci) * hw + i] - m);
                yb[std::size_t(ci) * hw + i] = e;
                sum += e;
            }
            for (int ci = 0; ci < c; ++ci) yb[std::size_t(ci) * hw + i] /= sum;
        }
    }
    return y;
}

// dL/dz_c = y_c * (gy_c - sum_j y_j gy_j), per pixel.
template <typename T>
TensorT<T> softmax_channel_backward(const TensorT<T>& gy, const TensorT<T>& y) {
    const int bs = y.shape[0], c = y.shape[1];
    const std::size_t hw = std::size_t(y.shape[2]) * y.shape[3];
    TensorT<T> gx(y.shape);
    for (int bi = 0; bi < bs; ++bi) {
        const T* yb = y.data() + std::size_t(bi) * c * hw;
        const T* gb = gy.data() + std::size_t(bi) * c * hw;
        T* gxb = gx.data() + std::size_t(bi) * c * hw;
        for (std::size_t i = 0; i < hw; ++i) {
            T dot = T(0);
            for (int ci = 0; ci < c; ++ci)
                dot += yb[std::size_t(ci) * hw + i] * gb[std::size_t(ci) * hw + i];
            for (int ci = 0; ci < c; ++ci)
                gxb[std::size_t(ci) * hw + i] =
                    yb[std::size_t(ci) * hw + i] * (gb[std::size_t(ci) * hw + i] - dot);
        }
    }
    return gx;
}

template <typename T>
TensorT<T> concat_channels(const std::vector<const TensorT<T>*>& parts) {
    int c_total = 0;
    for (auto* p : parts) c_total += p->shape[1];
    const int bs = parts[0]->shape[0], h = parts[0]->shape[2], w = parts[0]->shape[3];
    TensorT<T> y({bs, c_total, h, w});
    const std::size_t hw = std::size_t(h) * w;
    for (int bi = 0; bi < bs; ++bi) {
        std::size_t off = 0;
        for (auto* p : parts) {
            const int pc = p->shape[1];
            std::copy_n(p->data() + std::size_t(bi) * pc * hw, std::size_t(pc) * hw,
                        y.data() + (std::size_t(bi) * c_total) * hw + off);
            off += std::size_t(pc) * hw;
        }
    }
    return y;
}

template <typename T>
std::vector<TensorT<T>> split_channels(const TensorT<T>& gy, const std::vector<int>& channels) {
    const int bs = gy.shape[0], h = gy.shape[2], w = gy.shape[3];
    const std::size_t hw = std::size_t(h) * w;
    std::vector<TensorT<T>> parts;
    for (int c : channels) parts.emplace_back(std::vector<int>{bs, c, h, w});
    for (int bi = 0; bi < bs; ++bi) {
        std::size_t off = 0;
        for (auto& p : parts) {
            const int pc = p.shape[1];
            std::copy_n(gy.data() + (std::size_t(bi) * gy.shape[1]) * hw + off,
                        std::size_t(pc) * hw, p.data() + std::size_t(bi) * pc * hw);
            off += std::size_t(pc) * hw;
        }
    }
    return parts;
}

}  // namespace vseg
