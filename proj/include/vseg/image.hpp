#pragma once

#include <cstdint>
#include <vector>

#include "vseg/common.hpp"

namespace vseg {

// 8-bit RGB raster, interleaved row-major.
struct FundusImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;  // width*height*3

    FundusImage() = default;
    FundusImage(int w, int h) : width(w), height(h), data(std::size_t(w) * h * 3, 0) {}

    std::uint8_t& at(int x, int y, int c) { return data[(std::size_t(y) * width + x) * 3 + c]; }
    std::uint8_t at(int x, int y, int c) const { return data[(std::size_t(y) * width + x) * 3 + c]; }
};

// Per-pixel boolean mask (vessel ground truth, FOV membership, ...).
struct BinaryMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;  // 0 or 1

    BinaryMask() = default;
    BinaryMask(int w, int h) : width(w), height(h), data(std::size_t(w) * h, 0) {}

    bool at(int x, int y) const { return data[std::size_t(y) * width + x] != 0; }
    void set(int x, int y, bool v) { data[std::size_t(y) * width + x] = v ? 1 : 0; }
    std::size_t count() const {
        std::size_t n = 0;
        for (auto v : data) n += v ? 1 : 0;
        return n;
    }
    bool operator==(const BinaryMask&) const = default;
};

// Single-channel float image, values in [0,1].
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<float> data;

    GrayImage() = default;
    GrayImage(int w, int h) : width(w), height(h), data(std::size_t(w) * h, 0.f) {}

    float& at(int x, int y) { return data[std::size_t(y) * width + x]; }
    float at(int x, int y) const { return data[std::size_t(y) * width + x]; }
    bool operator==(const GrayImage&) const = default;
};

// Per-pixel label in {0..4}: 0 background, 1 near-thick band, 2 near-thin
// band, 3 thick vessel, 4 thin vessel. A plain binary task uses {0,1}.
struct ClassMap {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;

    ClassMap() = default;
    ClassMap(int w, int h) : width(w), height(h), data(std::size_t(w) * h, 0) {}

    std::uint8_t at(int x, int y) const { return data[std::size_t(y) * width + x]; }
    void set(int x, int y, std::uint8_t v) { data[std::size_t(y) * width + x] = v; }
    bool operator==(const ClassMap&) const = default;
};

constexpr int kClassCount = 5;

}  // namespace vseg
