#pragma once

#include "vseg/image.hpp"
#include "vseg/unet.hpp"

namespace vseg {

// Whole-image per-pixel class probabilities (fused head), stored planar
// (class, row, col). The vessel score sums the vessel-class probabilities.
struct ProbabilityMap {
    int width = 0, height = 0, classes = 0;
    std::vector<float> p;
    std::vector<int> vessel_classes;

    ProbabilityMap() = default;
    ProbabilityMap(int w, int h, int c)
        : width(w), height(h), classes(c), p(std::size_t(w) * h * c, 0.f) {}

    float prob(int c, int x, int y) const {
        return p[(std::size_t(c) * height + y) * width + x];
    }
    float& prob_ref(int c, int x, int y) {
        return p[(std::size_t(c) * height + y) * width + x];
    }
    float vessel_score(int x, int y) const {
        float s = 0.f;
        for (int c : vessel_classes) s += prob(c, x, y);
        return s;
    }
};

// {3,4} for the 5-class scheme, otherwise the last class.
std::vector<int> default_vessel_classes(int class_count);

// Tile with `stride` (mirror-padding images smaller than a patch), run
// eval-mode forwards, average overlapping probabilities. Pixels covered by a
// single tile keep the raw softmax output; overlapped pixels are
// renormalized after averaging.
ProbabilityMap predict_image(UNet& net, const GrayImage& img, int stride = 48,
                             int max_batch = 8);

// Vessel iff the per-pixel argmax lands on a vessel class; ties break toward
// the lower class index, so boundary classes stay background.
BinaryMask binarize(const ProbabilityMap& p);

}  // namespace vseg
