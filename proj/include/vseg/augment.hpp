#pragma once

#include "vseg/common.hpp"
#include "vseg/patches.hpp"

namespace vseg {

struct AugmentConfig {
    double flip_prob = 0.5;        // each axis, independently
    double rotation_deg = 30.0;    // uniform in [-r, r]
    double scale_lo = 0.9, scale_hi = 1.1;
    double shear_deg = 5.0;        // uniform in [-s, s]
    double noise_sigma = 0.02;     // Gaussian, input only
    double brightness_delta = 0.1; // uniform in [-d, d]
    double contrast_lo = 0.9, contrast_hi = 1.1;
    std::uint64_t seed = 0;

    void validate() const;
    static AugmentConfig identity();
};

// Geometric transforms (flip / rotate / scale / shear about the patch
// center) hit input and labels alike: input by bilinear sampling, labels by
// nearest neighbour (lround), out-of-bounds reads give 0 / class 0.
// Photometric transforms (noise, brightness, contrast) touch the input only;
// the result is clamped to [0,1]. Deterministic given the RNG state.
PatchSample augment(const PatchSample& sample, const AugmentConfig& cfg, Rng& draw);

}  // namespace vseg
