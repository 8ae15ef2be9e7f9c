#pragma once

#include <string>
#include <vector>

#include "vseg/common.hpp"

namespace vseg {

struct ManifestEntry {
    std::string image;
    std::string ground_truth;
    std::string fov;  // empty when absent
    std::string split;  // "train" or "test"
};

struct DatasetManifest {
    std::vector<ManifestEntry> entries;

    std::vector<ManifestEntry> split(const std::string& tag) const {
        std::vector<ManifestEntry> out;
        for (const auto& e : entries)
            if (e.split == tag) out.push_back(e);
        return out;
    }
};

// CSV, one entry per line: image,gt[,fov],split. '#' lines are comments.
// Relative paths resolve against the manifest's directory. Every referenced
// file must exist; otherwise a ValidationError lists the missing paths.
DatasetManifest load_manifest(const std::string& path);

// DRIVE directory convention: <root>/images, <root>/1st_manual, <root>/mask.
// Files pair by their leading integer id; all entries get `split_tag`.
DatasetManifest load_drive_dir(const std::string& root, const std::string& split_tag);

void save_manifest(const DatasetManifest& manifest, const std::string& path);

}  // namespace vseg
