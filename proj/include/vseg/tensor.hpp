#pragma once

#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "vseg/common.hpp"

namespace vseg {

// Dense N-D array, row-major. Activations use (batch, channels, height,
// width). Templated on the scalar so gradient checks can run the identical
// code in double; production uses float.
template <typename T>
struct TensorT {
    std::vector<int> shape;
    std::vector<T> v;

    TensorT() = default;
    explicit TensorT(std::vector<int> s) : shape(std::move(s)), v(numel_of(shape), T(0)) {}

    static std::size_t numel_of(const std::vector<int>& s) {
        std::size_t n = 1;
        for (int d : s) n *= std::size_t(d);
        return s.empty() ? 0 : n;
    }

    static TensorT zeros(std::vector<int> s) { return TensorT(std::move(s)); }

    std::size_t size() const { return v.size(); }
    int dim(int i) const { return shape[std::size_t(i)]; }
    T* data() { return v.data(); }
    const T* data() const { return v.data(); }

    // (b,c,h,w) accessors for rank-4 activations.
    T& at(int b, int c, int y, int x) {
        return v[((std::size_t(b) * shape[1] + c) * shape[2] + y) * shape[3] + x];
    }
    T at(int b, int c, int y, int x) const {
        return v[((std::size_t(b) * shape[1] + c) * shape[2] + y) * shape[3] + x];
    }

    void fill(T value) { std::fill(v.begin(), v.end(), value); }

    bool same_shape(const TensorT& o) const { return shape == o.shape; }

    std::string shape_str() const {
        std::string s = "(";
        for (std::size_t i = 0; i < shape.size(); ++i)
            s += (i ? "," : "") + std::to_string(shape[i]);
        return s + ")";
    }
};

using Tensor = TensorT<float>;

template <typename T>
void check_same_shape(const TensorT<T>& a, const TensorT<T>& b, const char* what) {
    if (!a.same_shape(b))
        throw ShapeError(std::string(what) + ": shape mismatch " + a.shape_str() + " vs " +
                         b.shape_str());
}

}  // namespace vseg
