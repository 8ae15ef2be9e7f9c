#include "vseg/render.hpp"

namespace vseg {

GrayImage score_heatmap(const ProbabilityMap& p) {
    GrayImage out(p.width, p.height);
    for (int y = 0; y < p.height; ++y)
        for (int x = 0; x < p.width; ++x) out.at(x, y) = p.vessel_score(x, y);
    return out;
}

GrayImage side_heatmap(const Tensor& side_map, const std::vector<int>& vessel_classes) {
    if (side_map.shape.size() != 4) throw ShapeError("side_heatmap: need a rank-4 map");
    const int h = side_map.shape[2], w = side_map.shape[3];
    GrayImage out(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            float s = 0.f;
            for (int c : vessel_classes) s += side_map.at(0, c, y, x);
            out.at(x, y) = s;
        }
    return out;
}

FundusImage error_overlay(const FundusImage& src, const BinaryMask& pred, const BinaryMask& gt,
                          const BinaryMask* fov) {
    if (src.width != pred.width || src.height != pred.height || src.width != gt.width ||
        src.height != gt.height)
        throw ShapeError("error_overlay: image/prediction/ground-truth sizes differ");
    FundusImage out = src;
    for (int y = 0; y < src.height; ++y)
        for (int x = 0; x < src.width; ++x) {
            if (fov && !fov->at(x, y)) continue;
            bool p = pred.at(x, y), g = gt.at(x, y);
            if (p && !g) {  // false positive: red
                out.at(x, y, 0) = 255;
                out.at(x, y, 1) = 0;
                out.at(x, y, 2) = 0;
            } else if (!p && g) {  // false negative: blue
                out.at(x, y, 0) = 0;
                out.at(x, y, 1) = 0;
                out.at(x, y, 2) = 255;
            }
        }
    return out;
}

FundusImage mask_to_image(const BinaryMask& mask) {
    FundusImage out(mask.width, mask.height);
    for (int y = 0; y < mask.height; ++y)
        for (int x = 0; x < mask.width; ++x) {
            std::uint8_t v = mask.at(x, y) ? 255 : 0;
            out.at(x, y, 0) = v;
            out.at(x, y, 1) = v;
            out.at(x, y, 2) = v;
        }
    return out;
}

}  // namespace vseg
