#include "vseg/augment.hpp"

#include <cmath>

namespace vseg {

void AugmentConfig::validate() const {
    if (flip_prob < 0 || flip_prob > 1) throw ArgumentError("flip probability outside [0,1]");
    if (rotation_deg < 0 || shear_deg < 0) throw ArgumentError("angle ranges must be >= 0");
    if (scale_lo > scale_hi || scale_lo <= 0) throw ArgumentError("bad scale range");
    if (contrast_lo > contrast_hi || contrast_lo <= 0) throw ArgumentError("bad contrast range");
    if (noise_sigma < 0 || brightness_delta < 0)
        throw ArgumentError("noise sigma / brightness delta must be >= 0");
}

AugmentConfig AugmentConfig::identity() {
    AugmentConfig cfg;
    cfg.flip_prob = 0;
    cfg.rotation_deg = 0;
    cfg.scale_lo = cfg.scale_hi = 1.0;
    cfg.shear_deg = 0;
    cfg.noise_sigma = 0;
    cfg.brightness_delta = 0;
    cfg.contrast_lo = cfg.contrast_hi = 1.0;
    return cfg;
}

namespace {

struct Mat2 {
    double a = 1, b = 0, c = 0, d = 1;  // [[a,b],[c,d]]

    Mat2 operator*(const Mat2& o) const {
        return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
    }
    Mat2 inverse() const {
        double det = a * d - b * c;
        return {d / det, -b / det, -c / det, a / det};
    }
};

float bilinear(const GrayImage& img, double sx, double sy) {
    if (sx < -0.5 || sy < -0.5 || sx > img.width - 0.5 || sy > img.height - 0.5) return 0.f;
    int x0 = int(std::floor(sx));
    int y0 = int(std::floor(sy));
    double fx = sx - x0, fy = sy - y0;
    auto px = [&](int x, int y) -> double {
        if (x < 0 || y < 0 || x >= img.width || y >= img.height) return 0.0;
        return img.at(x, y);
    };
    double top = px(x0, y0) * (1 - fx) + px(x0 + 1, y0) * fx;
    double bot = px(x0, y0 + 1) * (1 - fx) + px(x0 + 1, y0 + 1) * fx;
    return float(top * (1 - fy) + bot * fy);
}

std::uint8_t nearest_label(const ClassMap& map, double sx, double sy) {
    long x = std::lround(sx), y = std::lround(sy);
    if (x < 0 || y < 0 || x >= map.width || y >= map.height) return 0;
    return map.at(int(x), int(y));
}

}  // namespace

PatchSample augment(const PatchSample& sample, const AugmentConfig& cfg, Rng& draw) {
    cfg.validate();
    const double deg = 0.017453292519943295;

    // Fixed draw order, independent of which parts are active.
    bool flip_h = draw.bernoulli(cfg.flip_prob);
    bool flip_v = draw.bernoulli(cfg.flip_prob);
    double theta = draw.uniform(-cfg.rotation_deg, cfg.rotation_deg) * deg;
    double scale = draw.uniform(cfg.scale_lo, cfg.scale_hi);
    double shear = draw.uniform(-cfg.shear_deg, cfg.shear_deg) * deg;
    double bright = draw.uniform(-cfg.brightness_delta, cfg.brightness_delta);
    double contrast = draw.uniform(cfg.contrast_lo, cfg.contrast_hi);

    Mat2 rot{std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta)};
    Mat2 sh{1, std::tan(shear), 0, 1};
    Mat2 sc{scale, 0, 0, scale};
    Mat2 fl{flip_h ? -1.0 : 1.0, 0, 0, flip_v ? -1.0 : 1.0};
    Mat2 inv = (rot * sh * sc * fl).inverse();

    const int w = sample.input.width, h = sample.input.height;
    const double cx = (w - 1) / 2.0, cy = (h - 1) / 2.0;

    PatchSample out = sample;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double dx = x - cx, dy = y - cy;
            double sx = inv.a * dx + inv.b * dy + cx;
            double sy = inv.c * dx + inv.d * dy + cy;
            out.input.at(x, y) = bilinear(sample.input, sx, sy);
            out.labels.set(x, y, nearest_label(sample.labels, sx, sy));
        }
    }

    bool photometric = cfg.noise_sigma > 0 || bright != 0.0 || contrast != 1.0;
    if (photometric) {
        for (float& v : out.input.data) {
            double u = v;
            if (contrast != 1.0) u = (u - 0.5) * contrast + 0.5;
            u += bright;
            if (cfg.noise_sigma > 0) u += draw.normal() * cfg.noise_sigma;
            v = float(std::clamp(u, 0.0, 1.0));
        }
    }
    return out;
}

}  // namespace vseg
