#include "vseg/morphology.hpp"

namespace vseg {

StructuringElement StructuringElement::square(int side) {
    if (side <= 0 || side % 2 == 0)
        throw ArgumentError("structuring element side must be odd and positive, got " +
                            std::to_string(side));
    StructuringElement se;
    se.width = side;
    se.height = side;
    se.cells.assign(std::size_t(side) * side, 1);
    return se;
}

void StructuringElement::validate() const {
    if (width <= 0 || height <= 0 || width % 2 == 0 || height % 2 == 0)
        throw ArgumentError("structuring element sides must be odd and positive");
    if (cells.size() != std::size_t(width) * height)
        throw ArgumentError("structuring element cell count mismatch");
    if (!at(width / 2, height / 2))
        throw ArgumentError("structuring element anchor cell must be set");
    bool any = false;
    for (auto c : cells) any |= c != 0;
    if (!any) throw ArgumentError("structuring element must be nonempty");
}

BinaryMask erode(const BinaryMask& mask, const StructuringElement& se) {
    se.validate();
    const int ax = se.width / 2, ay = se.height / 2;
    BinaryMask out(mask.width, mask.height);
    for (int y = 0; y < mask.height; ++y) {
        for (int x = 0; x < mask.width; ++x) {
            bool all = true;
            for (int sy = 0; sy < se.height && all; ++sy) {
                for (int sx = 0; sx < se.width; ++sx) {
                    if (!se.at(sx, sy)) continue;
                    int px = x + sx - ax, py = y + sy - ay;
                    if (px < 0 || py < 0 || px >= mask.width || py >= mask.height ||
                        !mask.at(px, py)) {
                        all = false;
                        break;
                    }
                }
            }
            out.set(x, y, all);
        }
    }
    return out;
}

BinaryMask dilate(const BinaryMask& mask, const StructuringElement& se) {
    se.validate();
    const int ax = se.width / 2, ay = se.height / 2;
    BinaryMask out(mask.width, mask.height);
    for (int y = 0; y < mask.height; ++y) {
        for (int x = 0; x < mask.width; ++x) {
            if (!mask.at(x, y)) continue;
            // reflected element, anchored at (x,y)
            for (int sy = 0; sy < se.height; ++sy) {
                for (int sx = 0; sx < se.width; ++sx) {
                    if (!se.at(sx, sy)) continue;
                    int px = x - (sx - ax), py = y - (sy - ay);
                    if (px >= 0 && py >= 0 && px < mask.width && py < mask.height)
                        out.set(px, py, true);
                }
            }
        }
    }
    return out;
}

BinaryMask opening(const BinaryMask& mask, const StructuringElement& se) {
    return dilate(erode(mask, se), se);
}

}  // namespace vseg
