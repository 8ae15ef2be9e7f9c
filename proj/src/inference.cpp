#include "vseg/inference.hpp"

#include "vseg/patches.hpp"

namespace vseg {

std::vector<int> default_vessel_classes(int class_count) {
    if (class_count == kClassCount) return {3, 4};
    return {class_count - 1};
}

ProbabilityMap predict_image(UNet& net, const GrayImage& img, int stride, int max_batch) {
    const int patch = 96;
    if (stride < 1 || stride > patch)
        throw ArgumentError("predict_image: stride must be in [1,96]");
    if (max_batch < 1) throw ArgumentError("predict_image: max_batch must be >= 1");

    GrayImage padded = mirror_pad(img, patch, patch);
    auto rows = patch_origins(padded.height, patch, stride);
    auto cols = patch_origins(padded.width, patch, stride);

    struct Tile {
        int row, col;
    };
    std::vector<Tile> tiles;
    for (int r : rows)
        for (int c : cols) tiles.push_back({r, c});

    const int classes = net.cfg.class_count;
    std::vector<double> acc(std::size_t(classes) * padded.height * padded.width, 0.0);
    std::vector<int> cnt(std::size_t(padded.height) * padded.width, 0);

    for (std::size_t base = 0; base < tiles.size(); base += std::size_t(max_batch)) {
        std::size_t b = std::min<std::size_t>(max_batch, tiles.size() - base);
        Tensor x({int(b), 1, patch, patch});
        for (std::size_t k = 0; k < b; ++k) {
            const Tile& t = tiles[base + k];
            for (int y = 0; y < patch; ++y)
                for (int xx = 0; xx < patch; ++xx)
                    x.at(int(k), 0, y, xx) = padded.at(t.col + xx, t.row + y);
        }
        SideOutputSet outs = net.forward(x, Mode::Eval);
        for (std::size_t k = 0; k < b; ++k) {
            const Tile& t = tiles[base + k];
            for (int c = 0; c < classes; ++c)
                for (int y = 0; y < patch; ++y)
                    for (int xx = 0; xx < patch; ++xx)
                        acc[(std::size_t(c) * padded.height + (t.row + y)) * padded.width +
                            (t.col + xx)] += outs.fused.at(int(k), c, y, xx);
            for (int y = 0; y < patch; ++y)
                for (int xx = 0; xx < patch; ++xx)
                    ++cnt[std::size_t(t.row + y) * padded.width + (t.col + xx)];
        }
    }

    ProbabilityMap out(img.width, img.height, classes);
    out.vessel_classes = default_vessel_classes(classes);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            int n = cnt[std::size_t(y) * padded.width + x];
            if (n == 1) {
                for (int c = 0; c < classes; ++c)
                    out.prob_ref(c, x, y) =
                        float(acc[(std::size_t(c) * padded.height + y) * padded.width + x]);
                continue;
            }
            double sum = 0;
            for (int c = 0; c < classes; ++c)
                sum += acc[(std::size_t(c) * padded.height + y) * padded.width + x];
            for (int c = 0; c < classes; ++c)
                out.prob_ref(c, x, y) =
                    float(acc[(std::size_t(c) * padded.height + y) * padded.width + x] / sum);
        }
    }
    return out;
}

BinaryMask binarize(const ProbabilityMap& p) {
    BinaryMask mask(p.width, p.height);
    for (int y = 0; y < p.height; ++y) {
        for (int x = 0; x < p.width; ++x) {
            int best = 0;
            float best_p = p.prob(0, x, y);
            for (int c = 1; c < p.classes; ++c) {
                float v = p.prob(c, x, y);
                if (v > best_p) {
                    best_p = v;
                    best = c;
                }
            }
            bool vessel = false;
            for (int c : p.vessel_classes) vessel |= best == c;
            mask.set(x, y, vessel);
        }
    }
    return mask;
}

}  // namespace vseg
