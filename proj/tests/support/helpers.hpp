#pragma once

#include <filesystem>
#include <fstream>
#include <string>

#include "vseg/common.hpp"
#include "vseg/image.hpp"
#include "vseg/morphology.hpp"

namespace vseg::testing {

struct TempDir {
    std::filesystem::path path;

    explicit TempDir(const std::string& tag) {
        path = std::filesystem::temp_directory_path() /
               ("vseg_" + tag + "_" + std::to_string(std::uintptr_t(this)));
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

inline void write_bytes(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary);
    out.write(bytes.data(), std::streamsize(bytes.size()));
}

inline BinaryMask random_mask(int w, int h, double density, Rng& rng) {
    BinaryMask m(w, h);
    for (auto& v : m.data) v = rng.uniform01() < density ? 1 : 0;
    return m;
}

// Independent double-loop morphology oracles, straight from the definition.
inline BinaryMask dilate_naive(const BinaryMask& m, const StructuringElement& se) {
    BinaryMask out(m.width, m.height);
    int ax = se.width / 2, ay = se.height / 2;
    for (int y = 0; y < m.height; ++y)
        for (int x = 0; x < m.width; ++x) {
            bool hit = false;
            for (int v = 0; v < se.height && !hit; ++v)
                for (int u = 0; u < se.width && !hit; ++u) {
                    if (!se.at(u, v)) continue;
                    int sx = x + u - ax, sy = y + v - ay;
                    if (sx >= 0 && sy >= 0 && sx < m.width && sy < m.height && m.at(sx, sy))
                        hit = true;
                }
            out.set(x, y, hit);
        }
    return out;
}

inline BinaryMask erode_naive(const BinaryMask& m, const StructuringElement& se) {
    BinaryMask out(m.width, m.height);
    int ax = se.width / 2, ay = se.height / 2;
    for (int y = 0; y < m.height; ++y)
        for (int x = 0; x < m.width; ++x) {
            bool all = true;
            for (int v = 0; v < se.height && all; ++v)
                for (int u = 0; u < se.width && all; ++u) {
                    if (!se.at(u, v)) continue;
                    int sx = x + u - ax, sy = y + v - ay;
                    if (sx < 0 || sy < 0 || sx >= m.width || sy >= m.height || !m.at(sx, sy))
                        all = false;
                }
            out.set(x, y, all);
        }
    return out;
}

// Pairwise Mann-Whitney statistic: P(score_pos > score_neg) + 0.5 P(equal).
inline double mann_whitney_auc(const std::vector<float>& scores,
                               const std::vector<std::uint8_t>& labels) {
    double wins = 0;
    std::size_t pos = 0, neg = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (!labels[i]) continue;
        ++pos;
        for (std::size_t j = 0; j < scores.size(); ++j) {
            if (labels[j]) continue;
            if (scores[i] > scores[j])
                wins += 1.0;
            else if (scores[i] == scores[j])
                wins += 0.5;
        }
    }
    for (auto l : labels) neg += l ? 0 : 1;
    return wins / (double(pos) * double(neg));
}

}  // namespace vseg::testing
