#pragma once

#include "vseg/image.hpp"

namespace vseg {

struct PatchSample {
    GrayImage input;   // patch x patch
    ClassMap labels;   // same dimensions
    int row = 0, col = 0;  // origin in the (possibly padded) source image
    int source_id = 0;     // manifest index

    bool operator==(const PatchSample&) const = default;
};

// Grid positions along one axis: steps of `stride`, the final position
// snapped so the last patch ends exactly at the border.
std::vector<int> patch_origins(int size, int patch, int stride);

// Symmetric mirror padding on the right/bottom up to at least (min_w, min_h).
GrayImage mirror_pad(const GrayImage& img, int min_w, int min_h);
ClassMap mirror_pad(const ClassMap& map, int min_w, int min_h);

// Cut (img, labels) into aligned patch pairs covering every pixel.
// Images smaller than `patch` are mirror-padded first.
std::vector<PatchSample> extract_patches(const GrayImage& img, const ClassMap& labels,
                                         int patch = 96, int stride = 48);

}  // namespace vseg
