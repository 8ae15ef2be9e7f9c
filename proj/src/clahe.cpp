#include "vseg/clahe.hpp"

#include <algorithm>
#include <cmath>

namespace vseg {

namespace {

int quantize(float v, int bins) {
    int b = int(v * (bins - 1) + 0.5f);
    return std::clamp(b, 0, bins - 1);
}

}  // namespace

GrayImage to_gray(const FundusImage& img) {
    if (img.width <= 0 || img.height <= 0) throw ArgumentError("to_gray: zero-area image");
    GrayImage out(img.width, img.height);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
            out.at(x, y) = float(img.at(x, y, 1)) / 255.f;
    return out;
}

ClaheMaps clahe_tile_maps(const GrayImage& img, int grid_rows, int grid_cols, double clip_limit,
                          int bins) {
    if (img.width <= 0 || img.height <= 0) throw ArgumentError("clahe: zero-area image");
    if (grid_rows < 1 || grid_cols < 1) throw ArgumentError("clahe: tile grid must be >= 1x1");
    if (!(clip_limit > 0)) throw ArgumentError("clahe: clip limit must be positive");
    if (bins < 2) throw ArgumentError("clahe: need at least 2 bins");

    ClaheMaps maps;
    maps.grid_rows = grid_rows;
    maps.grid_cols = grid_cols;
    maps.tile_w = (img.width + grid_cols - 1) / grid_cols;
    maps.tile_h = (img.height + grid_rows - 1) / grid_rows;
    maps.bins = bins;
    maps.luts.assign(std::size_t(grid_rows) * grid_cols * bins, 0.0);

    const int tile_pixels = maps.tile_w * maps.tile_h;
    const long clip = std::max(1L, long(clip_limit * tile_pixels / bins));

    std::vector<long> hist(bins);
    for (int tr = 0; tr < grid_rows; ++tr) {
        for (int tc = 0; tc < grid_cols; ++tc) {
            std::fill(hist.begin(), hist.end(), 0L);
            for (int dy = 0; dy < maps.tile_h; ++dy) {
                int y = std::min(tr * maps.tile_h + dy, img.height - 1);  // edge replication
                for (int dx = 0; dx < maps.tile_w; ++dx) {
                    int x = std::min(tc * maps.tile_w + dx, img.width - 1);
                    ++hist[quantize(img.at(x, y), bins)];
                }
            }

            // clip and spread the excess uniformly
            long excess = 0;
            for (int b = 0; b < bins; ++b) {
                if (hist[b] > clip) {
                    excess += hist[b] - clip;
                    hist[b] = clip;
                }
            }
            long per_bin = excess / bins;
            long leftover = excess % bins;
            for (int b = 0; b < bins; ++b) hist[b] += per_bin + (b < leftover ? 1 : 0);

            long cdf = 0;
            for (int b = 0; b < bins; ++b) {
                cdf += hist[b];
                maps.luts[(std::size_t(tr) * grid_cols + tc) * bins + b] =
                    double(cdf) / double(tile_pixels);
            }
        }
    }
    return maps;
}

GrayImage clahe(const GrayImage& img, int grid_rows, int grid_cols, double clip_limit, int bins) {
    ClaheMaps maps = clahe_tile_maps(img, grid_rows, grid_cols, clip_limit, bins);

    GrayImage out(img.width, img.height);
    for (int y = 0; y < img.height; ++y) {
        double gy = (y + 0.5) / maps.tile_h - 0.5;
        int r0 = int(std::floor(gy));
        double fy = gy - r0;
        int r0c = std::clamp(r0, 0, grid_rows - 1);
        int r1c = std::clamp(r0 + 1, 0, grid_rows - 1);
        for (int x = 0; x < img.width; ++x) {
            double gx = (x + 0.5) / maps.tile_w - 0.5;
            int c0 = int(std::floor(gx));
            double fx = gx - c0;
            int c0c = std::clamp(c0, 0, grid_cols - 1);
            int c1c = std::clamp(c0 + 1, 0, grid_cols - 1);

            int b = quantize(img.at(x, y), bins);
            double top = maps.lut(r0c, c0c, b) * (1 - fx) + maps.lut(r0c, c1c, b) * fx;
            double bot = maps.lut(r1c, c0c, b) * (1 - fx) + maps.lut(r1c, c1c, b) * fx;
            double v = top * (1 - fy) + bot * fy;
            out.at(x, y) = float(std::clamp(v, 0.0, 1.0));
        }
    }
    return out;
}

GrayImage to_gray_clahe(const FundusImage& img, int grid_rows, int grid_cols, double clip_limit) {
    return clahe(to_gray(img), grid_rows, grid_cols, clip_limit);
}

}  // namespace vseg
