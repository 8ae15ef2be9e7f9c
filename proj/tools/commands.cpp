#include "commands.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "vseg/image_io.hpp"
#include "vseg/inference.hpp"
#include "vseg/metrics.hpp"
#include "vseg/pipeline.hpp"
#include "vseg/render.hpp"

namespace fs = std::filesystem;

namespace vseg::cli {

namespace {

const std::set<std::string> kKnownKeys = {
    "net.enc_channels", "net.bottleneck", "net.dropout",
    "clahe.rows", "clahe.cols", "clahe.clip",
    "labels.band_radius", "labels.five_class", "labels.boost",
    "mask.threshold",
    "train.epochs", "train.lr", "train.lr_halve_period", "train.momentum", "train.l2",
    "train.batch", "train.checkpoint_every", "train.stride", "train.augment",
    "train.resume", "train.weights", "train.weights_file",
    "aug.flip_prob", "aug.rotation", "aug.scale_lo", "aug.scale_hi", "aug.shear",
    "aug.noise_sigma", "aug.brightness", "aug.contrast_lo", "aug.contrast_hi",
    "infer.stride", "infer.batch",
};

DatasetManifest load_dataset(const RunOptions& opt, const std::string& default_split) {
    if (opt.manifest.empty()) throw ArgumentError("missing --manifest");
    std::string split = opt.split.empty() ? default_split : opt.split;
    if (fs::is_directory(opt.manifest)) return load_drive_dir(opt.manifest, split);
    DatasetManifest m = load_manifest(opt.manifest);
    DatasetManifest filtered;
    filtered.entries = m.split(split);
    return filtered;
}

PreprocessConfig preprocess_config(const KeyValueConfig& kv) {
    PreprocessConfig cfg;
    cfg.clahe_rows = kv.get_int("clahe.rows", cfg.clahe_rows);
    cfg.clahe_cols = kv.get_int("clahe.cols", cfg.clahe_cols);
    cfg.clahe_clip = kv.get_double("clahe.clip", cfg.clahe_clip);
    cfg.band_radius = kv.get_int("labels.band_radius", cfg.band_radius);
    cfg.five_class = kv.get_bool("labels.five_class", cfg.five_class);
    cfg.mask_threshold = kv.get_int("mask.threshold", cfg.mask_threshold);
    return cfg;
}

NetConfig net_config(const KeyValueConfig& kv, bool five_class) {
    NetConfig cfg;
    cfg.enc_channels = kv.get_int_list("net.enc_channels", cfg.enc_channels);
    cfg.bottleneck_channels = kv.get_int("net.bottleneck", cfg.bottleneck_channels);
    cfg.dropout_rate = kv.get_double("net.dropout", cfg.dropout_rate);
    cfg.class_count = five_class ? 5 : 2;
    cfg.validate();
    return cfg;
}

TrainConfig train_config(const KeyValueConfig& kv, std::uint64_t seed) {
    TrainConfig cfg;
    cfg.epochs = kv.get_int("train.epochs", cfg.epochs);
    cfg.initial_lr = kv.get_double("train.lr", cfg.initial_lr);
    cfg.lr_halve_period = kv.get_int("train.lr_halve_period", cfg.lr_halve_period);
    cfg.momentum = kv.get_double("train.momentum", cfg.momentum);
    cfg.l2 = kv.get_double("train.l2", cfg.l2);
    cfg.batch_size = kv.get_int("train.batch", cfg.batch_size);
    cfg.checkpoint_every = kv.get_int("train.checkpoint_every", cfg.checkpoint_every);
    cfg.stride = kv.get_int("train.stride", cfg.stride);
    cfg.augment_enabled = kv.get_bool("train.augment", cfg.augment_enabled);
    cfg.seed = seed;
    cfg.aug.flip_prob = kv.get_double("aug.flip_prob", cfg.aug.flip_prob);
    cfg.aug.rotation_deg = kv.get_double("aug.rotation", cfg.aug.rotation_deg);
    cfg.aug.scale_lo = kv.get_double("aug.scale_lo", cfg.aug.scale_lo);
    cfg.aug.scale_hi = kv.get_double("aug.scale_hi", cfg.aug.scale_hi);
    cfg.aug.shear_deg = kv.get_double("aug.shear", cfg.aug.shear_deg);
    cfg.aug.noise_sigma = kv.get_double("aug.noise_sigma", cfg.aug.noise_sigma);
    cfg.aug.brightness_delta = kv.get_double("aug.brightness", cfg.aug.brightness_delta);
    cfg.aug.contrast_lo = kv.get_double("aug.contrast_lo", cfg.aug.contrast_lo);
    cfg.aug.contrast_hi = kv.get_double("aug.contrast_hi", cfg.aug.contrast_hi);
    cfg.aug.seed = seed;
    return cfg;
}

ClassWeights boost_from(const KeyValueConfig& kv) {
    ClassWeights boost;
    auto v = kv.get_double_list("labels.boost", {1, 1, 1, 1, 1});
    if (v.size() != kClassCount) throw ArgumentError("labels.boost needs 5 values");
    for (int c = 0; c < kClassCount; ++c) boost[c] = v[c];
    return boost;
}

ClassWeights read_weights_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open weights file: " + path);
    ClassWeights w;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        for (int c = 0; c < kClassCount; ++c)
            if (!(ss >> w[c])) throw ParseError("weights file needs 5 numbers", 1);
        w.validate();
        return w;
    }
    throw ParseError("weights file has no data line", 1);
}

void write_weights_file(const ClassWeights& w, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write weights file: " + path);
    out << "# class weights 0..4\n";
    char buf[256];
    std::snprintf(buf, sizeof buf, "%.9g %.9g %.9g %.9g %.9g\n", w[0], w[1], w[2], w[3], w[4]);
    out << buf;
}

ClassWeights resolve_weights(const KeyValueConfig& kv,
                             const std::vector<TrainSample>& samples) {
    if (kv.has("train.weights")) {
        auto v = kv.get_double_list("train.weights", {});
        if (v.size() != kClassCount) throw ArgumentError("train.weights needs 5 values");
        ClassWeights w;
        for (int c = 0; c < kClassCount; ++c) w[c] = v[c];
        w.validate();
        return w;
    }
    if (kv.has("train.weights_file")) return read_weights_file(kv.get_str("train.weights_file", ""));
    std::vector<ClassMap> maps;
    for (const auto& s : samples) maps.push_back(s.labels);
    return weights_from_frequencies(maps, boost_from(kv));
}

UNet load_net_from_checkpoint(const RunOptions& opt, const KeyValueConfig& kv, bool five_class) {
    if (opt.checkpoint.empty()) throw ArgumentError("missing --checkpoint");
    Checkpoint ckpt = read_checkpoint(opt.checkpoint);
    UNet net(net_config(kv, five_class));
    load_params(net.params, ckpt);
    return net;
}

// Stitched side + fused probability maps for a whole image.
std::vector<ProbabilityMap> predict_all_maps(UNet& net, const GrayImage& img, int stride) {
    const int patch = 96;
    GrayImage padded = mirror_pad(img, patch, patch);
    auto rows = patch_origins(padded.height, patch, stride);
    auto cols = patch_origins(padded.width, patch, stride);

    const int n_maps = net.cfg.stages() + 1;  // sides then fused
    const int classes = net.cfg.class_count;
    std::vector<std::vector<double>> acc(
        n_maps, std::vector<double>(std::size_t(classes) * padded.height * padded.width, 0.0));
    std::vector<int> cnt(std::size_t(padded.height) * padded.width, 0);

    for (int r : rows) {
        for (int c : cols) {
            Tensor x({1, 1, patch, patch});
            for (int y = 0; y < patch; ++y)
                for (int xx = 0; xx < patch; ++xx) x.at(0, 0, y, xx) = padded.at(c + xx, r + y);
            SideOutputSet outs = net.forward(x, Mode::Eval);
            for (int m = 0; m < n_maps; ++m) {
                const Tensor& map = m < net.cfg.stages() ? outs.sides[m] : outs.fused;
                for (int cc = 0; cc < classes; ++cc)
                    for (int y = 0; y < patch; ++y)
                        for (int xx = 0; xx < patch; ++xx)
                            acc[m][(std::size_t(cc) * padded.height + (r + y)) * padded.width +
                                   (c + xx)] += map.at(0, cc, y, xx);
            }
            for (int y = 0; y < patch; ++y)
                for (int xx = 0; xx < patch; ++xx)
                    ++cnt[std::size_t(r + y) * padded.width + (c + xx)];
        }
    }

    std::vector<ProbabilityMap> out;
    for (int m = 0; m < n_maps; ++m) {
        ProbabilityMap pm(img.width, img.height, classes);
        pm.vessel_classes = default_vessel_classes(classes);
        for (int y = 0; y < img.height; ++y)
            for (int x = 0; x < img.width; ++x) {
                int n = cnt[std::size_t(y) * padded.width + x];
                double sum = 0;
                for (int cc = 0; cc < classes; ++cc)
                    sum += acc[m][(std::size_t(cc) * padded.height + y) * padded.width + x];
                for (int cc = 0; cc < classes; ++cc) {
                    double v = acc[m][(std::size_t(cc) * padded.height + y) * padded.width + x];
                    pm.prob_ref(cc, x, y) = float(n == 1 ? v : v / sum);
                }
            }
        out.push_back(std::move(pm));
    }
    return out;
}

std::string fmt4(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

}  // namespace

KeyValueConfig resolve_config(const RunOptions& opt) {
    KeyValueConfig kv;
    if (!opt.config.empty()) kv = KeyValueConfig::load(opt.config);
    for (const auto& kvs : opt.overrides) {
        auto eq = kvs.find('=');
        if (eq == std::string::npos)
            throw ArgumentError("--set expects key=value, got: " + kvs);
        std::string key = kvs.substr(0, eq);
        if (!kKnownKeys.count(key)) throw ArgumentError("--set names unknown key: " + key);
        kv.set(key, kvs.substr(eq + 1));
    }
    for (const auto& [key, value] : kv.entries())
        if (!kKnownKeys.count(key)) throw ArgumentError("config names unknown key: " + key);
    return kv;
}

int cmd_prepare(const RunOptions& opt) {
    KeyValueConfig kv = resolve_config(opt);
    PreprocessConfig pp = preprocess_config(kv);

    DatasetManifest all;
    if (fs::is_directory(opt.manifest)) {
        all = load_drive_dir(opt.manifest, opt.split.empty() ? "train" : opt.split);
    } else {
        all = load_manifest(opt.manifest);
    }
    if (all.entries.empty()) throw ArgumentError("prepare: manifest has no entries");

    fs::create_directories(opt.out);
    std::array<std::size_t, kClassCount> hist{};
    std::vector<ClassMap> train_maps;
    for (const auto& e : all.entries) {
        BinaryMask gt = load_mask(e.ground_truth, pp.mask_threshold);
        ClassMap map = build_class_map(gt, pp.band_radius);
        auto h = class_histogram(map);
        for (int c = 0; c < kClassCount; ++c) hist[c] += h[c];
        if (e.split == "train") train_maps.push_back(map);
        std::string name = fs::path(e.image).stem().string() + "_classes.png";
        save_class_map_png(map, (fs::path(opt.out) / name).string());
    }

    if (train_maps.empty())
        for (const auto& e : all.entries) {
            BinaryMask gt = load_mask(e.ground_truth, pp.mask_threshold);
            train_maps.push_back(build_class_map(gt, pp.band_radius));
        }
    ClassWeights weights = weights_from_frequencies(train_maps, boost_from(kv));
    write_weights_file(weights, (fs::path(opt.out) / "weights.txt").string());

    std::size_t total = 0;
    for (auto n : hist) total += n;
    std::printf("class pixel histogram (%zu pixels over %zu images):\n", total,
                all.entries.size());
    for (int c = 0; c < kClassCount; ++c)
        std::printf("  class %d: %12zu  (%.2f%%)  weight %.4f\n", c, hist[c],
                    100.0 * double(hist[c]) / double(total), weights[c]);
    std::printf("wrote %zu class maps and weights.txt to %s\n", all.entries.size(),
                opt.out.c_str());
    return 0;
}

int cmd_train(const RunOptions& opt) {
    KeyValueConfig kv = resolve_config(opt);
    PreprocessConfig pp = preprocess_config(kv);

    DatasetManifest manifest = load_dataset(opt, "train");
    if (manifest.entries.empty()) throw ArgumentError("train: no entries in the train split");
    std::vector<TrainSample> samples = prepare_train_samples(manifest.entries, pp);

    TrainConfig tc = train_config(kv, opt.seed);
    tc.class_weights = resolve_weights(kv, samples);

    UNet net(net_config(kv, pp.five_class));
    Checkpoint resume;
    bool resuming = kv.has("train.resume");
    if (resuming)
        resume = read_checkpoint(kv.get_str("train.resume", ""));
    else
        net.init(opt.seed);

    std::printf("training on %zu images, %d epochs, class weights", samples.size(), tc.epochs);
    for (int c = 0; c < net.cfg.class_count; ++c) std::printf(" %.3f", tc.class_weights[c]);
    std::printf("\n");

    TrainResult result = train(net, samples, tc, opt.out, resuming ? &resume : nullptr,
                               [&](const EpochRecord& r) {
                                   std::printf("epoch %3d  lr %.5f  total %.5f  fused %.5f"
                                               "  (%.1fs)\n",
                                               r.epoch, r.lr, r.total, r.fused, r.seconds);
                                   std::fflush(stdout);
                               });
    std::printf("final checkpoint: %s/ckpt_final.vseg\n", opt.out.c_str());
    return 0;
}

int cmd_predict(const RunOptions& opt) {
    KeyValueConfig kv = resolve_config(opt);
    PreprocessConfig pp = preprocess_config(kv);
    UNet net = load_net_from_checkpoint(opt, kv, pp.five_class);
    const int stride = kv.get_int("infer.stride", 48);
    const int batch = kv.get_int("infer.batch", 8);

    DatasetManifest manifest = load_dataset(opt, "test");
    if (manifest.entries.empty()) throw ArgumentError("predict: no entries in the split");
    std::vector<EvalItem> items = prepare_eval_items(manifest.entries, pp);

    fs::create_directories(opt.out);
    for (const auto& item : items) {
        ProbabilityMap p = predict_image(net, item.input, stride, batch);
        save_gray_png(score_heatmap(p), (fs::path(opt.out) / (item.id + "_prob.png")).string());
        save_image(mask_to_image(binarize(p)),
                   (fs::path(opt.out) / (item.id + "_mask.png")).string());
        std::printf("predicted %s\n", item.id.c_str());
    }
    return 0;
}

int cmd_evaluate(const RunOptions& opt) {
    KeyValueConfig kv = resolve_config(opt);
    PreprocessConfig pp = preprocess_config(kv);
    UNet net = load_net_from_checkpoint(opt, kv, pp.five_class);
    const int stride = kv.get_int("infer.stride", 48);
    const int batch = kv.get_int("infer.batch", 8);

    DatasetManifest manifest = load_dataset(opt, "test");
    if (manifest.entries.empty()) throw ArgumentError("evaluate: no entries in the split");
    std::vector<EvalItem> items = prepare_eval_items(manifest.entries, pp);

    fs::create_directories(opt.out);
    std::ofstream csv((fs::path(opt.out) / "metrics.csv").string(), std::ios::binary);
    csv << "image,Acc,Sp,Se,AUC,AUC_thick,AUC_thin\n";
    std::printf("%-20s |   Acc  |   Sp   |   Se   |  AUC\n", "image");

    double sum_acc = 0, sum_sp = 0, sum_se = 0, sum_auc = 0;
    for (const auto& item : items) {
        ProbabilityMap p = predict_image(net, item.input, stride, batch);
        const BinaryMask* fov = item.has_fov ? &item.fov : nullptr;
        BinaryMetrics bm = confusion(binarize(p), item.gt, fov);
        StratifiedAuc sa = stratified_auc(p, item.classes, fov);

        csv << item.id << ',' << fmt4(bm.acc) << ',' << fmt4(bm.sp) << ',' << fmt4(bm.se) << ','
            << fmt4(sa.all) << ',' << fmt4(sa.thick) << ',' << fmt4(sa.thin) << '\n';
        std::printf("%-20s | %.4f | %.4f | %.4f | %.4f\n", item.id.c_str(), bm.acc, bm.sp, bm.se,
                    sa.all);
        sum_acc += bm.acc;
        sum_sp += bm.sp;
        sum_se += bm.se;
        sum_auc += sa.all;
    }
    double n = double(items.size());
    std::printf("%-20s | %.4f | %.4f | %.4f | %.4f\n", "mean", sum_acc / n, sum_sp / n,
                sum_se / n, sum_auc / n);
    std::printf("metrics written to %s/metrics.csv\n", opt.out.c_str());
    return 0;
}

int cmd_report(const RunOptions& opt) {
    KeyValueConfig kv = resolve_config(opt);
    PreprocessConfig pp = preprocess_config(kv);
    UNet net = load_net_from_checkpoint(opt, kv, pp.five_class);
    const int stride = kv.get_int("infer.stride", 48);

    DatasetManifest manifest = load_dataset(opt, "test");
    if (manifest.entries.empty()) throw ArgumentError("report: no entries in the split");
    if (opt.index < 0 || opt.index >= int(manifest.entries.size()))
        throw ArgumentError("report: --index outside the split (have " +
                            std::to_string(manifest.entries.size()) + " entries)");
    const ManifestEntry& entry = manifest.entries[std::size_t(opt.index)];

    FundusImage src = load_image(entry.image);
    std::vector<EvalItem> items = prepare_eval_items({entry}, pp);
    const EvalItem& item = items.front();

    std::vector<ProbabilityMap> maps = predict_all_maps(net, item.input, stride);
    fs::create_directories(opt.out);

    const int n_sides = net.cfg.stages();
    for (int i = 0; i < n_sides; ++i) {
        std::string name = "side" + std::to_string(i + 1) + ".png";
        save_gray_png(score_heatmap(maps[std::size_t(i)]), (fs::path(opt.out) / name).string());
    }
    const ProbabilityMap& fused = maps.back();
    save_gray_png(score_heatmap(fused), (fs::path(opt.out) / "fused_prob.png").string());
    BinaryMask mask = binarize(fused);
    save_image(mask_to_image(mask), (fs::path(opt.out) / "mask.png").string());
    const BinaryMask* fov = item.has_fov ? &item.fov : nullptr;
    save_image(error_overlay(src, mask, item.gt, fov),
               (fs::path(opt.out) / "overlay.png").string());

    std::printf("report for %s: %d files in %s\n", item.id.c_str(), n_sides + 3,
                opt.out.c_str());
    return 0;
}

}  // namespace vseg::cli
