#include "support/synthetic.hpp"

#include <cmath>
#include <filesystem>

#include "vseg/clahe.hpp"
#include "vseg/image_io.hpp"
#include "vseg/labelgen.hpp"
#include "vseg/manifest.hpp"
#include "vseg/render.hpp"

namespace fs = std::filesystem;

namespace vseg::testing {

namespace {

// contrast drop per stroke width; thin strokes are the faint ones
double stroke_contrast(int width) {
    static const double table[6] = {0, 0.10, 0.13, 0.19, 0.23, 0.26};
    return table[width];
}

void stamp_square(BinaryMask& mask, double cx, double cy, int width) {
    int x0 = int(std::lround(cx)) - (width - 1) / 2;
    int y0 = int(std::lround(cy)) - (width - 1) / 2;
    for (int dy = 0; dy < width; ++dy)
        for (int dx = 0; dx < width; ++dx) {
            int x = x0 + dx, y = y0 + dy;
            if (x >= 0 && y >= 0 && x < mask.width && y < mask.height) mask.set(x, y, true);
        }
}

}  // namespace

SyntheticImage make_vessel_image(int size, std::uint64_t seed) {
    Rng rng(derive_seed(seed, 0x57A7u));
    const int n_curves = 4 + int(rng.uniform_index(3));

    BinaryMask vessels(size, size);
    std::vector<double> drop(std::size_t(size) * size, 0.0);

    for (int k = 0; k < n_curves; ++k) {
        // guarantee a mix: alternate thin and thick strokes
        int width = (k % 2 == 0) ? 1 + int(rng.uniform_index(2))   // 1..2
                                 : 3 + int(rng.uniform_index(3));  // 3..5
        double contrast = stroke_contrast(width) * rng.uniform(0.85, 1.15);

        double x = rng.uniform(0.1, 0.9) * size;
        double y = rng.uniform(0.1, 0.9) * size;
        double angle = rng.uniform(0, 6.283185307179586);
        int steps = int(size * rng.uniform(1.1, 1.8));

        BinaryMask stroke(size, size);
        for (int s = 0; s < steps; ++s) {
            stamp_square(stroke, x, y, width);
            angle += rng.normal() * 0.09;
            x += std::cos(angle);
            y += std::sin(angle);
            if (x < 2 || y < 2 || x > size - 3 || y > size - 3) angle += 1.9;  // turn back inside
            x = std::clamp(x, 0.0, double(size - 1));
            y = std::clamp(y, 0.0, double(size - 1));
        }
        for (std::size_t i = 0; i < stroke.data.size(); ++i) {
            if (!stroke.data[i]) continue;
            vessels.data[i] = 1;
            drop[i] = std::max(drop[i], contrast);
        }
    }

    // background: gentle radial + sinusoidal shading
    std::vector<double> intensity(std::size_t(size) * size);
    double px = rng.uniform(0.3, 0.7) * size, py = rng.uniform(0.3, 0.7) * size;
    double phase = rng.uniform(0, 6.28);
    for (int yy = 0; yy < size; ++yy)
        for (int xx = 0; xx < size; ++xx) {
            double r = std::hypot(xx - px, yy - py) / size;
            double base = 0.62 - 0.12 * r + 0.03 * std::sin(phase + 7.0 * double(xx) / size);
            intensity[std::size_t(yy) * size + xx] = base - drop[std::size_t(yy) * size + xx];
        }

    // 3x3 box blur softens stroke edges
    std::vector<double> blurred(intensity.size());
    for (int yy = 0; yy < size; ++yy)
        for (int xx = 0; xx < size; ++xx) {
            double sum = 0;
            int n = 0;
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx) {
                    int x = xx + dx, y = yy + dy;
                    if (x < 0 || y < 0 || x >= size || y >= size) continue;
                    sum += intensity[std::size_t(y) * size + x];
                    ++n;
                }
            blurred[std::size_t(yy) * size + xx] = sum / n;
        }

    SyntheticImage out;
    out.vessels = std::move(vessels);
    out.image = FundusImage(size, size);
    for (std::size_t i = 0; i < blurred.size(); ++i) {
        double v = blurred[i] + rng.normal() * 0.015;
        v = std::clamp(v, 0.03, 0.97);
        auto byte = std::uint8_t(std::lround(v * 255.0));
        out.image.data[i * 3 + 0] = byte;
        out.image.data[i * 3 + 1] = byte;
        out.image.data[i * 3 + 2] = byte;
    }
    return out;
}

std::vector<TrainSample> make_train_samples(int n, int size, std::uint64_t seed,
                                            int band_radius) {
    std::vector<TrainSample> out;
    for (int i = 0; i < n; ++i) {
        SyntheticImage s = make_vessel_image(size, derive_seed(seed, 0x1111u, std::uint64_t(i)));
        TrainSample t;
        t.input = to_gray(s.image);
        t.labels = build_class_map(s.vessels, band_radius);
        out.push_back(std::move(t));
    }
    return out;
}

std::string write_corpus(const std::string& dir, int n_images, int size, int n_train,
                         std::uint64_t seed) {
    fs::create_directories(fs::path(dir) / "images");
    fs::create_directories(fs::path(dir) / "gt");

    DatasetManifest manifest;
    for (int i = 0; i < n_images; ++i) {
        SyntheticImage s = make_vessel_image(size, derive_seed(seed, 0xC0Bu, std::uint64_t(i)));
        char name[32];
        std::snprintf(name, sizeof name, "img%03d.png", i);
        std::string img_path = (fs::path(dir) / "images" / name).string();
        std::string gt_path = (fs::path(dir) / "gt" / name).string();
        save_image(s.image, img_path);
        save_image(mask_to_image(s.vessels), gt_path);

        ManifestEntry e;
        e.image = img_path;
        e.ground_truth = gt_path;
        e.split = i < n_train ? "train" : "test";
        manifest.entries.push_back(e);
    }
    std::string manifest_path = (fs::path(dir) / "manifest.csv").string();
    save_manifest(manifest, manifest_path);
    return manifest_path;
}

}  // namespace vseg::testing
