#include "vseg/patches.hpp"

namespace vseg {

std::vector<int> patch_origins(int size, int patch, int stride) {
    if (stride < 1) throw ArgumentError("patch stride must be >= 1");
    if (patch < 1 || size < patch)
        throw ArgumentError("patch_origins: need size >= patch >= 1");
    std::vector<int> out;
    for (int pos = 0;; pos += stride) {
        if (pos + patch >= size) {
            int last = size - patch;
            if (out.empty() || out.back() != last) out.push_back(last);
            break;
        }
        out.push_back(pos);
    }
    return out;
}

namespace {

// Symmetric reflection index (edge included): ... 1 0 | 0 1 2 ... n-1 | n-1 n-2 ...
int reflect(int i, int n) {
    int p = 2 * n;
    int j = i % p;
    return j < n ? j : p - 1 - j;
}

template <typename Img>
Img pad_impl(const Img& src, int min_w, int min_h) {
    int w = std::max(src.width, min_w);
    int h = std::max(src.height, min_h);
    if (w == src.width && h == src.height) return src;
    Img out(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            out.data[std::size_t(y) * w + x] =
                src.data[std::size_t(reflect(y, src.height)) * src.width + reflect(x, src.width)];
    return out;
}

}  // namespace

GrayImage mirror_pad(const GrayImage& img, int min_w, int min_h) {
    if (img.width < 1 || img.height < 1) throw ArgumentError("mirror_pad: empty image");
    return pad_impl(img, min_w, min_h);
}

ClassMap mirror_pad(const ClassMap& map, int min_w, int min_h) {
    if (map.width < 1 || map.height < 1) throw ArgumentError("mirror_pad: empty map");
    return pad_impl(map, min_w, min_h);
}

std::vector<PatchSample> extract_patches(const GrayImage& img, const ClassMap& labels,
                                         int patch, int stride) {
    if (img.width != labels.width || img.height != labels.height)
        throw ShapeError("extract_patches: image and labels differ in size");
    GrayImage in = mirror_pad(img, patch, patch);
    ClassMap lab = mirror_pad(labels, patch, patch);

    auto rows = patch_origins(in.height, patch, stride);
    auto cols = patch_origins(in.width, patch, stride);

    std::vector<PatchSample> out;
    out.reserve(rows.size() * cols.size());
    for (int r : rows) {
        for (int c : cols) {
            PatchSample s;
            s.input = GrayImage(patch, patch);
            s.labels = ClassMap(patch, patch);
            s.row = r;
            s.col = c;
            for (int y = 0; y < patch; ++y)
                for (int x = 0; x < patch; ++x) {
                    s.input.at(x, y) = in.at(c + x, r + y);
                    s.labels.set(x, y, lab.at(c + x, r + y));
                }
            out.push_back(std::move(s));
        }
    }
    return out;
}

}  // namespace vseg
