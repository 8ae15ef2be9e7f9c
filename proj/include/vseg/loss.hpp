#pragma once

#include <limits>

#include "vseg/image.hpp"
#include "vseg/labelgen.hpp"
#include "vseg/unet.hpp"

namespace vseg {

// Batched per-pixel class targets.
struct LabelBatch {
    int b = 0, h = 0, w = 0;
    std::vector<std::uint8_t> v;

    LabelBatch() = default;
    LabelBatch(int b_, int h_, int w_) : b(b_), h(h_), w(w_), v(std::size_t(b_) * h_ * w_, 0) {}

    static LabelBatch from_maps(const std::vector<const ClassMap*>& maps) {
        LabelBatch lb(int(maps.size()), maps[0]->height, maps[0]->width);
        for (std::size_t i = 0; i < maps.size(); ++i) {
            if (maps[i]->width != lb.w || maps[i]->height != lb.h)
                throw ShapeError("label batch: class maps differ in size");
            std::copy(maps[i]->data.begin(), maps[i]->data.end(),
                      lb.v.begin() + std::ptrdiff_t(i) * lb.h * lb.w);
        }
        return lb;
    }

    std::uint8_t at(int bi, int y, int x) const {
        return v[(std::size_t(bi) * h + y) * w + x];
    }
};

// log() is floored at this probability so a confident miss stays finite.
constexpr double kProbFloor = 1e-7;

// Mean over pixels of -weight[target] * log(pred[target]).
// When `grad` is non-null it receives dLoss/dPred (zero where the floor binds).
template <typename T>
double weighted_cross_entropy(const TensorT<T>& pred, const LabelBatch& target,
                              const std::vector<double>& weights, TensorT<T>* grad = nullptr) {
    if (pred.shape.size() != 4)
        throw ShapeError("weighted_cross_entropy: prediction must be rank 4");
    const int bs = pred.shape[0], c = pred.shape[1], h = pred.shape[2], w = pred.shape[3];
    if (target.b != bs || target.h != h || target.w != w)
        throw ShapeError("weighted_cross_entropy: prediction " + pred.shape_str() +
                         " does not match target batch (" + std::to_string(target.b) + "," +
                         std::to_string(target.h) + "," + std::to_string(target.w) + ")");
    if (int(weights.size()) != c)
        throw ShapeError("weighted_cross_entropy: need one weight per class");

    if (grad) *grad = TensorT<T>(pred.shape);
    const std::size_t hw = std::size_t(h) * w;
    const double n = double(bs) * double(hw);
    double loss = 0;
    for (int bi = 0; bi < bs; ++bi) {
        const T* pb = pred.data() + std::size_t(bi) * c * hw;
        for (std::size_t i = 0; i < hw; ++i) {
            int cls = target.v[std::size_t(bi) * hw + i];
            if (cls >= c) throw ShapeError("weighted_cross_entropy: target class out of range");
            double p = double(pb[std::size_t(cls) * hw + i]);
            double wgt = weights[std::size_t(cls)];
            if (p > kProbFloor) {
                loss -= wgt * std::log(p);
                if (grad) grad->v[(std::size_t(bi) * c + cls) * hw + i] = T(-wgt / (p * n));
            } else if (p == p) {
                loss -= wgt * std::log(kProbFloor);
            } else {
                loss = std::numeric_limits<double>::quiet_NaN();  // NaN activations surface
            }
        }
    }
    return loss / n;
}

// (lambda/2) * sum of squared values over decay-flagged parameters.
template <typename T>
double l2_term(const ParamStoreT<T>& ps, double lambda) {
    double s = 0;
    for (const auto& [name, p] : ps.entries()) {
        if (!p.decay) continue;
        for (auto v : p.value.v) s += double(v) * double(v);
    }
    return 0.5 * lambda * s;
}

template <typename T>
void l2_add_grads(ParamStoreT<T>& ps, double lambda) {
    for (auto& [name, p] : ps.entries()) {
        if (!p.decay) continue;
        for (std::size_t i = 0; i < p.value.v.size(); ++i)
            p.grad.v[i] += T(lambda) * p.value.v[i];
    }
}

struct LossParts {
    double total = 0;
    double fused = 0;
    std::vector<double> sides;
    double l2 = 0;
};

// Eq. total: CE(fused) + sum of side CEs + L2. Scalar only.
template <typename T>
LossParts total_loss_value(const SideOutputSetT<T>& outs, const LabelBatch& target,
                           const std::vector<double>& weights, const ParamStoreT<T>& ps,
                           double lambda) {
    LossParts parts;
    parts.fused = weighted_cross_entropy(outs.fused, target, weights);
    for (const auto& s : outs.sides)
        parts.sides.push_back(weighted_cross_entropy(s, target, weights));
    parts.l2 = l2_term(ps, lambda);
    parts.total = parts.fused + parts.l2;
    for (double s : parts.sides) parts.total += s;
    return parts;
}

// Full training step value+gradient: runs CE on every output map, pushes the
// gradients back through the network, and adds the L2 pull. Parameter grads
// must be zeroed by the caller beforehand.
template <typename T>
LossParts total_loss_and_grads(UNetT<T>& net, const SideOutputSetT<T>& outs,
                               const LabelBatch& target, const std::vector<double>& weights,
                               double lambda) {
    LossParts parts;
    TensorT<T> dfused;
    parts.fused = weighted_cross_entropy(outs.fused, target, weights, &dfused);
    std::vector<TensorT<T>> dsides(outs.sides.size());
    for (std::size_t i = 0; i < outs.sides.size(); ++i)
        parts.sides.push_back(weighted_cross_entropy(outs.sides[i], target, weights, &dsides[i]));
    net.backward(outs, dsides, dfused);
    parts.l2 = l2_term(net.params, lambda);
    l2_add_grads(net.params, lambda);
    parts.total = parts.fused + parts.l2;
    for (double s : parts.sides) parts.total += s;
    return parts;
}

// First `count` entries of the 5-class weight table.
inline std::vector<double> weight_vector(const ClassWeights& w, int count) {
    if (count < 1 || count > kClassCount)
        throw ArgumentError("weight_vector: class count out of range");
    return std::vector<double>(w.w.begin(), w.w.begin() + count);
}

}  // namespace vseg
