#include "vseg/pipeline.hpp"

#include <filesystem>

namespace vseg {

namespace {

std::string stem_of(const std::string& path) {
    return std::filesystem::path(path).stem().string();
}

}  // namespace

std::vector<TrainSample> prepare_train_samples(const std::vector<ManifestEntry>& entries,
                                               const PreprocessConfig& cfg) {
    std::vector<TrainSample> out;
    out.reserve(entries.size());
    for (const auto& e : entries) {
        TrainSample s;
        s.input = to_gray_clahe(load_image(e.image), cfg.clahe_rows, cfg.clahe_cols,
                                cfg.clahe_clip);
        BinaryMask gt = load_mask(e.ground_truth, cfg.mask_threshold);
        if (gt.width != s.input.width || gt.height != s.input.height)
            throw ValidationError("ground truth size differs from image: " + e.ground_truth);
        s.labels = cfg.five_class ? build_class_map(gt, cfg.band_radius) : binary_class_map(gt);
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<EvalItem> prepare_eval_items(const std::vector<ManifestEntry>& entries,
                                         const PreprocessConfig& cfg) {
    std::vector<EvalItem> out;
    out.reserve(entries.size());
    for (const auto& e : entries) {
        EvalItem item;
        item.id = stem_of(e.image);
        item.input = to_gray_clahe(load_image(e.image), cfg.clahe_rows, cfg.clahe_cols,
                                   cfg.clahe_clip);
        item.gt = load_mask(e.ground_truth, cfg.mask_threshold);
        if (item.gt.width != item.input.width || item.gt.height != item.input.height)
            throw ValidationError("ground truth size differs from image: " + e.ground_truth);
        item.classes = build_class_map(item.gt, cfg.band_radius);
        if (!e.fov.empty()) {
            item.fov = load_mask(e.fov, cfg.mask_threshold);
            if (item.fov.width != item.input.width || item.fov.height != item.input.height)
                throw ValidationError("FOV mask size differs from image: " + e.fov);
            item.has_fov = true;
        }
        out.push_back(std::move(item));
    }
    return out;
}

}  // namespace vseg
