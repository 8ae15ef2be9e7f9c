#include <doctest.h>

#include <cmath>

#include "support/helpers.hpp"
#include "vseg/clahe.hpp"

using namespace vseg;

namespace {

// Naive CLAHE oracle, written from the textual definition: per-tile clipped
// histogram over edge-replicated tiles, cdf/N mapping, bilinear blend of the
// four nearest tile mappings by distance to tile centers.
GrayImage clahe_oracle(const GrayImage& img, int rows, int cols, double clip_limit) {
    const int bins = 256;
    const int tw = (img.width + cols - 1) / cols;
    const int th = (img.height + rows - 1) / rows;
    const long clip = std::max(1L, long(clip_limit * tw * th / bins));

    auto level = [&](float v) {
        int b = int(v * 255.f + 0.5f);
        return std::clamp(b, 0, 255);
    };

    // per-tile mapping tables
    std::vector<std::vector<double>> lut(std::size_t(rows) * cols,
                                         std::vector<double>(bins, 0.0));
    for (int tr = 0; tr < rows; ++tr)
        for (int tc = 0; tc < cols; ++tc) {
            std::vector<long> hist(bins, 0);
            for (int dy = 0; dy < th; ++dy)
                for (int dx = 0; dx < tw; ++dx) {
                    int x = std::min(tc * tw + dx, img.width - 1);
                    int y = std::min(tr * th + dy, img.height - 1);
                    ++hist[std::size_t(level(img.at(x, y)))];
                }
            long excess = 0;
            for (auto& h : hist)
                if (h > clip) {
                    excess += h - clip;
                    h = clip;
                }
            for (int b = 0; b < bins; ++b)
                hist[std::size_t(b)] += excess / bins + (b < excess % bins ? 1 : 0);
            long cdf = 0;
            for (int b = 0; b < bins; ++b) {
                cdf += hist[std::size_t(b)];
                lut[std::size_t(tr) * cols + tc][std::size_t(b)] = double(cdf) / (tw * th);
            }
        }

    GrayImage out(img.width, img.height);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            double gx = (x + 0.5) / tw - 0.5;
            double gy = (y + 0.5) / th - 0.5;
            int c0 = int(std::floor(gx)), r0 = int(std::floor(gy));
            double fx = gx - c0, fy = gy - r0;
            auto at = [&](int r, int c) {
                r = std::clamp(r, 0, rows - 1);
                c = std::clamp(c, 0, cols - 1);
                return lut[std::size_t(r) * cols + c][std::size_t(level(img.at(x, y)))];
            };
            double v = (at(r0, c0) * (1 - fx) + at(r0, c0 + 1) * fx) * (1 - fy) +
                       (at(r0 + 1, c0) * (1 - fx) + at(r0 + 1, c0 + 1) * fx) * fy;
            out.at(x, y) = float(std::clamp(v, 0.0, 1.0));
        }
    return out;
}

}  // namespace

TEST_CASE("green channel extraction: (10,20,30) -> 20/255") {
    FundusImage img(1, 1);
    img.at(0, 0, 0) = 10;
    img.at(0, 0, 1) = 20;
    img.at(0, 0, 2) = 30;
    GrayImage g = to_gray(img);
    CHECK(g.at(0, 0) == doctest::Approx(20.0 / 255.0));
}

TEST_CASE("constant image stays constant under CLAHE") {
    GrayImage img(32, 32);
    for (auto& v : img.data) v = 0.4f;
    GrayImage out = clahe(img, 4, 4, 2.0);
    for (auto v : out.data) CHECK(v == doctest::Approx(double(out.data[0])));
}

TEST_CASE("two-level 64x64 image matches the naive oracle within one gray level") {
    GrayImage img(64, 64);
    Rng rng(21);
    for (int y = 0; y < 64; ++y)
        for (int x = 0; x < 64; ++x) {
            // uneven two-level pattern: dark blob in one corner
            bool dark = (x + y < 48) || rng.bernoulli(0.2);
            img.at(x, y) = dark ? 0.25f : 0.70f;
        }
    GrayImage mine = clahe(img, 2, 2, 2.0);
    GrayImage oracle = clahe_oracle(img, 2, 2, 2.0);
    for (std::size_t i = 0; i < mine.data.size(); ++i)
        CHECK(std::abs(mine.data[i] - oracle.data[i]) <= 1.0f / 255.0f + 1e-6f);
}

TEST_CASE("random images match the oracle too") {
    Rng rng(77);
    GrayImage img(40, 56);
    for (auto& v : img.data) v = float(rng.uniform01());
    GrayImage mine = clahe(img, 3, 5, 3.0);
    GrayImage oracle = clahe_oracle(img, 3, 5, 3.0);
    for (std::size_t i = 0; i < mine.data.size(); ++i)
        CHECK(std::abs(mine.data[i] - oracle.data[i]) <= 1.0f / 255.0f + 1e-6f);
}

TEST_CASE("per-tile mappings are monotone") {
    Rng rng(5);
    GrayImage img(48, 48);
    for (auto& v : img.data) v = float(rng.uniform01());
    ClaheMaps maps = clahe_tile_maps(img, 4, 4, 2.0);
    for (int tr = 0; tr < maps.grid_rows; ++tr)
        for (int tc = 0; tc < maps.grid_cols; ++tc)
            for (int b = 1; b < maps.bins; ++b)
                CHECK(maps.lut(tr, tc, b) >= maps.lut(tr, tc, b - 1));
}

TEST_CASE("CLAHE rejects degenerate arguments") {
    GrayImage empty;
    CHECK_THROWS_AS(clahe(empty, 8, 8, 2.0), ArgumentError);
    GrayImage img(8, 8);
    CHECK_THROWS_AS(clahe(img, 0, 8, 2.0), ArgumentError);
    CHECK_THROWS_AS(clahe(img, 8, 8, 0.0), ArgumentError);
    FundusImage fi;
    CHECK_THROWS_AS(to_gray(fi), ArgumentError);
}
