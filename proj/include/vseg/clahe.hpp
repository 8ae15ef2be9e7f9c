#pragma once

#include "vseg/image.hpp"

namespace vseg {

// Green channel scaled to [0,1]; grayscale inputs already have equal channels.
GrayImage to_gray(const FundusImage& img);

// Per-tile clipped-histogram equalization LUTs. Exposed so tests can check
// LUT monotonicity and compare against a naive oracle.
struct ClaheMaps {
    int grid_rows = 0, grid_cols = 0;
    int tile_w = 0, tile_h = 0;  // padded tile size
    int bins = 0;
    std::vector<double> luts;  // grid_rows*grid_cols*bins, values in [0,1]

    double lut(int tr, int tc, int bin) const {
        return luts[(std::size_t(tr) * grid_cols + tc) * bins + bin];
    }
};

ClaheMaps clahe_tile_maps(const GrayImage& img, int grid_rows, int grid_cols, double clip_limit,
                          int bins = 256);

// CLAHE: clipped per-tile histograms, bilinear interpolation between the
// tile mappings. Edge tiles are filled by edge replication.
GrayImage clahe(const GrayImage& img, int grid_rows = 8, int grid_cols = 8,
                double clip_limit = 2.0, int bins = 256);

GrayImage to_gray_clahe(const FundusImage& img, int grid_rows = 8, int grid_cols = 8,
                        double clip_limit = 2.0);

}  // namespace vseg
