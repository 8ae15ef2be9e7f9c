#pragma once

#include "vseg/image.hpp"

namespace vseg {

// Boolean neighborhood with odd side lengths; the anchor is the center cell
// and must be set.
struct StructuringElement {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> cells;

    static StructuringElement square(int side);

    bool at(int x, int y) const { return cells[std::size_t(y) * width + x] != 0; }
    void validate() const;
};

// Minkowski erosion/dilation. Out-of-bounds pixels count as background:
// dilation never reaches outside, erosion fails wherever the element pokes
// past the border.
BinaryMask erode(const BinaryMask& mask, const StructuringElement& se);
BinaryMask dilate(const BinaryMask& mask, const StructuringElement& se);

// Erosion then dilation; removes structures thinner than the element.
BinaryMask opening(const BinaryMask& mask, const StructuringElement& se);

}  // namespace vseg
