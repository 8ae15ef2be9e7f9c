#pragma once

#include <array>

#include "vseg/image.hpp"
#include "vseg/morphology.hpp"

namespace vseg {

// Per-class loss weights, all positive.
struct ClassWeights {
    std::array<double, kClassCount> w{1, 1, 1, 1, 1};

    double operator[](std::size_t i) const { return w[i]; }
    double& operator[](std::size_t i) { return w[i]; }
    void validate() const {
        for (double x : w)
            if (!(x > 0)) throw ArgumentError("class weights must be positive");
    }
};

// Thick = opening with a 3x3 square (keeps widths >= 3); thin = the rest.
// The two parts partition the input vessel mask.
std::pair<BinaryMask, BinaryMask> split_thick_thin(const BinaryMask& vessels);

// 5-class ground truth: thick vessels 3, thin vessels 4, background within
// `band_radius` (Chebyshev) of thick 1, of thin 2. Near both, thin wins.
ClassMap build_class_map(const BinaryMask& vessels, int band_radius = 2);

// Binary relabeling for the plain 2-class baseline: vessel 1, background 0.
ClassMap binary_class_map(const BinaryMask& vessels);

// Histogram of labels 0..4.
std::array<std::size_t, kClassCount> class_histogram(const ClassMap& map);

// Inverse-frequency weights: total/(5*count_c) with a count floor of 1,
// scaled by `boost` per class, then renormalized so the minimum weight is 1.
ClassWeights weights_from_frequencies(const std::vector<ClassMap>& maps,
                                      const ClassWeights& boost = ClassWeights{});

}  // namespace vseg
