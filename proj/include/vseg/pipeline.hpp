#pragma once

#include "vseg/clahe.hpp"
#include "vseg/image_io.hpp"
#include "vseg/labelgen.hpp"
#include "vseg/manifest.hpp"
#include "vseg/trainer.hpp"

namespace vseg {

struct PreprocessConfig {
    int clahe_rows = 8, clahe_cols = 8;
    double clahe_clip = 2.0;
    int band_radius = 2;
    bool five_class = true;  // false: plain vessel/background labels
    int mask_threshold = 127;
};

// Manifest entry -> CLAHE-enhanced input + class-map labels.
std::vector<TrainSample> prepare_train_samples(const std::vector<ManifestEntry>& entries,
                                               const PreprocessConfig& cfg);

struct EvalItem {
    std::string id;       // image filename stem
    GrayImage input;      // CLAHE-enhanced
    BinaryMask gt;        // vessel ground truth
    ClassMap classes;     // always the 5-class map, for stratified AUC
    BinaryMask fov;
    bool has_fov = false;
};

std::vector<EvalItem> prepare_eval_items(const std::vector<ManifestEntry>& entries,
                                         const PreprocessConfig& cfg);

}  // namespace vseg
