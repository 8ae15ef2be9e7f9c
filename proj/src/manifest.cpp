#include "vseg/manifest.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace fs = std::filesystem;

namespace vseg {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(cur);
    for (auto& f : fields) {
        while (!f.empty() && (f.back() == ' ' || f.back() == '\t' || f.back() == '\r'))
            f.pop_back();
        std::size_t i = 0;
        while (i < f.size() && (f[i] == ' ' || f[i] == '\t')) ++i;
        f.erase(0, i);
    }
    return fields;
}

std::string resolve(const fs::path& base, const std::string& p) {
    fs::path path(p);
    if (path.is_absolute()) return path.string();
    return (base / path).lexically_normal().string();
}

void validate_files(const DatasetManifest& m) {
    std::vector<std::string> missing;
    for (const auto& e : m.entries) {
        if (!fs::exists(e.image)) missing.push_back(e.image);
        if (!fs::exists(e.ground_truth)) missing.push_back(e.ground_truth);
        if (!e.fov.empty() && !fs::exists(e.fov)) missing.push_back(e.fov);
    }
    if (!missing.empty()) {
        std::string msg = "manifest references missing files:";
        for (const auto& p : missing) msg += "\n  " + p;
        throw ValidationError(msg);
    }
}

// Leading integer id of a filename, or -1.
int leading_id(const std::string& name) {
    std::size_t i = 0;
    long v = 0;
    while (i < name.size() && name[i] >= '0' && name[i] <= '9') {
        v = v * 10 + (name[i] - '0');
        ++i;
    }
    return i == 0 ? -1 : static_cast<int>(v);
}

std::map<int, std::string> index_dir(const fs::path& dir) {
    std::map<int, std::string> out;
    if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir.string());
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        int id = leading_id(entry.path().filename().string());
        if (id >= 0) out[id] = entry.path().string();
    }
    return out;
}

}  // namespace

DatasetManifest load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open manifest: " + path);
    fs::path base = fs::path(path).parent_path();

    DatasetManifest m;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string trimmed = line;
        while (!trimmed.empty() && (trimmed.back() == '\r' || trimmed.back() == ' '))
            trimmed.pop_back();
        if (trimmed.empty() || trimmed[0] == '#') continue;

        auto fields = split_csv(trimmed);
        if (fields.size() != 3 && fields.size() != 4)
            throw ParseError("manifest line needs 3 or 4 comma-separated fields, got " +
                                 std::to_string(fields.size()),
                             line_no);

        ManifestEntry e;
        e.image = resolve(base, fields[0]);
        e.ground_truth = resolve(base, fields[1]);
        if (fields.size() == 4) e.fov = resolve(base, fields[2]);
        e.split = fields.back();
        if (e.split != "train" && e.split != "test")
            throw ParseError("split tag must be 'train' or 'test', got '" + e.split + "'",
                             line_no);
        m.entries.push_back(std::move(e));
    }
    validate_files(m);
    return m;
}

DatasetManifest load_drive_dir(const std::string& root, const std::string& split_tag) {
    if (split_tag != "train" && split_tag != "test")
        throw ArgumentError("split tag must be 'train' or 'test', got '" + split_tag + "'");
    fs::path base(root);
    auto images = index_dir(base / "images");
    auto manuals = index_dir(base / "1st_manual");
    auto fovs = fs::is_directory(base / "mask") ? index_dir(base / "mask")
                                                : std::map<int, std::string>{};

    DatasetManifest m;
    for (const auto& [id, img] : images) {
        auto gt = manuals.find(id);
        if (gt == manuals.end())
            throw ValidationError("no ground truth in 1st_manual/ for image id " +
                                  std::to_string(id) + " (" + img + ")");
        ManifestEntry e;
        e.image = img;
        e.ground_truth = gt->second;
        if (auto f = fovs.find(id); f != fovs.end()) e.fov = f->second;
        e.split = split_tag;
        m.entries.push_back(std::move(e));
    }
    if (m.entries.empty()) throw ValidationError("no images found under " + root + "/images");
    validate_files(m);
    return m;
}

void save_manifest(const DatasetManifest& manifest, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write manifest: " + path);
    out << "# image,gt[,fov],split\n";
    for (const auto& e : manifest.entries) {
        out << e.image << ',' << e.ground_truth;
        if (!e.fov.empty()) out << ',' << e.fov;
        out << ',' << e.split << '\n';
    }
    if (!out) throw IoError("manifest write failed: " + path);
}

}  // namespace vseg
