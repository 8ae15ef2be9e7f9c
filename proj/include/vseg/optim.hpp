#pragma once

#include "vseg/unet.hpp"

namespace vseg {

// Per-parameter velocity buffers, zero-initialized.
template <typename T>
struct OptimizerStateT {
    std::map<std::string, TensorT<T>> velocity;

    void init_from(const ParamStoreT<T>& ps) {
        velocity.clear();
        for (const auto& [name, p] : ps.entries())
            if (p.trainable) velocity.emplace(name, TensorT<T>(p.value.shape));
    }
};

using OptimizerState = OptimizerStateT<float>;

// v <- mu*v + g ; w <- w - rate*v
template <typename T>
void sgd_step(ParamStoreT<T>& ps, OptimizerStateT<T>& state, T rate, T momentum) {
    for (auto& [name, p] : ps.entries()) {
        if (!p.trainable) continue;
        auto it = state.velocity.find(name);
        if (it == state.velocity.end())
            throw ShapeError("optimizer state missing velocity for " + name);
        TensorT<T>& vel = it->second;
        if (!vel.same_shape(p.value))
            throw ShapeError("velocity shape mismatch for " + name + ": " + vel.shape_str() +
                             " vs " + p.value.shape_str());
        for (std::size_t i = 0; i < vel.v.size(); ++i) {
            vel.v[i] = momentum * vel.v[i] + p.grad.v[i];
            p.value.v[i] -= rate * vel.v[i];
        }
    }
}

}  // namespace vseg
