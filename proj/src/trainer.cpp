#include "vseg/trainer.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>

namespace vseg {

void TrainConfig::validate() const {
    if (epochs < 1) throw ArgumentError("train: epochs must be >= 1");
    if (!(initial_lr > 0)) throw ArgumentError("train: learning rate must be positive");
    if (lr_halve_period < 1) throw ArgumentError("train: halving period must be >= 1");
    if (momentum < 0 || momentum >= 1) throw ArgumentError("train: momentum must be in [0,1)");
    if (l2 < 0) throw ArgumentError("train: l2 coefficient must be >= 0");
    if (batch_size < 1) throw ArgumentError("train: batch size must be >= 1");
    if (checkpoint_every < 1) throw ArgumentError("train: checkpoint cadence must be >= 1");
    if (patch < 1 || stride < 1) throw ArgumentError("train: patch and stride must be >= 1");
    class_weights.validate();
    aug.validate();
}

double lr_at_epoch(const TrainConfig& cfg, int epoch) {
    if (epoch < 0 || epoch >= cfg.epochs)
        throw ArgumentError("lr_at_epoch: epoch " + std::to_string(epoch) +
                            " outside [0," + std::to_string(cfg.epochs) + ")");
    return cfg.initial_lr / double(1 << (epoch / cfg.lr_halve_period));
}

void TrainLog::save_csv(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write train log: " + path);
    int n_sides = records.empty() ? 4 : int(records.front().sides.size());
    out << "epoch,lr,total,fused";
    for (int i = 1; i <= n_sides; ++i) out << ",side" << i;
    out << ",seconds\n";
    char buf[64];
    auto fmt = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.9g", v);
        return std::string(buf);
    };
    for (const auto& r : records) {
        out << r.epoch << ',' << fmt(r.lr) << ',' << fmt(r.total) << ',' << fmt(r.fused);
        for (double s : r.sides) out << ',' << fmt(s);
        out << ',' << fmt(r.seconds) << '\n';
    }
    if (!out) throw IoError("train log write failed: " + path);
}

std::string config_digest(const NetConfig& net, const TrainConfig& train) {
    std::string s = "net:in=" + std::to_string(net.in_channels) + ";enc=";
    for (std::size_t i = 0; i < net.enc_channels.size(); ++i)
        s += (i ? "," : "") + std::to_string(net.enc_channels[i]);
    s += ";bott=" + std::to_string(net.bottleneck_channels);
    s += ";classes=" + std::to_string(net.class_count);
    s += ";drop=" + std::to_string(net.dropout_rate);
    s += "|train:epochs=" + std::to_string(train.epochs);
    s += ";lr=" + std::to_string(train.initial_lr);
    s += ";halve=" + std::to_string(train.lr_halve_period);
    s += ";mom=" + std::to_string(train.momentum);
    s += ";l2=" + std::to_string(train.l2);
    s += ";batch=" + std::to_string(train.batch_size);
    s += ";seed=" + std::to_string(train.seed);
    s += ";patch=" + std::to_string(train.patch);
    s += ";stride=" + std::to_string(train.stride);
    s += ";aug=" + std::to_string(train.augment_enabled ? 1 : 0);

    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
    return std::string(hex);
}

Checkpoint make_checkpoint(const ParamStore& params, const OptimizerState& opt,
                           std::uint32_t epoch, const std::string& digest) {
    Checkpoint ckpt = params_to_checkpoint(params, epoch, digest);
    for (const auto& [name, vel] : opt.velocity) {
        TensorBlob blob;
        for (int d : vel.shape) blob.shape.push_back(std::uint32_t(d));
        blob.values = vel.v;
        ckpt.tensors.emplace("opt." + name, std::move(blob));
    }
    return ckpt;
}

namespace {

void load_velocities(OptimizerState& opt, const Checkpoint& ckpt) {
    for (auto& [name, vel] : opt.velocity) {
        auto it = ckpt.tensors.find("opt." + name);
        if (it == ckpt.tensors.end()) continue;  // foreign checkpoint: start at rest
        if (it->second.values.size() != vel.v.size())
            throw ShapeError("checkpoint velocity 'opt." + name + "' has wrong element count");
        vel.v = it->second.values;
    }
}

}  // namespace

TrainResult train(UNet& net, const std::vector<TrainSample>& data, const TrainConfig& cfg,
                  const std::string& out_dir, const Checkpoint* resume,
                  const std::function<void(const EpochRecord&)>& on_epoch) {
    cfg.validate();
    if (data.empty()) throw ArgumentError("train: empty train split");
    const std::string digest = config_digest(net.cfg, cfg);

    // patch pool, in manifest order
    std::vector<PatchSample> pool;
    for (std::size_t si = 0; si < data.size(); ++si) {
        auto ps = extract_patches(data[si].input, data[si].labels, cfg.patch, cfg.stride);
        for (auto& p : ps) {
            p.source_id = int(si);
            pool.push_back(std::move(p));
        }
    }

    OptimizerState opt;
    opt.init_from(net.params);

    int start_epoch = 0;
    if (resume) {
        if (resume->config_digest != digest)
            throw ValidationError("checkpoint config digest mismatch: file has '" +
                                  resume->config_digest + "', run expects '" + digest + "'");
        load_params(net.params, *resume);
        load_velocities(opt, *resume);
        start_epoch = int(resume->epoch);
        if (start_epoch >= cfg.epochs)
            throw ArgumentError("checkpoint is already at epoch " + std::to_string(start_epoch));
    }

    const std::vector<double> weights = weight_vector(cfg.class_weights, net.cfg.class_count);
    if (!out_dir.empty()) std::filesystem::create_directories(out_dir);

    TrainResult result;
    const int n_sides = net.cfg.stages();

    for (int epoch = start_epoch; epoch < cfg.epochs; ++epoch) {
        auto t0 = std::chrono::steady_clock::now();
        const double lr = lr_at_epoch(cfg, epoch);

        std::vector<std::size_t> order(pool.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        Rng shuffle_rng(derive_seed(cfg.seed, 0x5eedu, std::uint64_t(epoch)));
        shuffle_rng.shuffle(order.begin(), order.end());

        double sum_total = 0, sum_fused = 0;
        std::vector<double> sum_sides(n_sides, 0.0);
        std::size_t seen = 0;

        for (std::size_t base = 0, batch_idx = 0; base < order.size();
             base += cfg.batch_size, ++batch_idx) {
            std::size_t b = std::min<std::size_t>(cfg.batch_size, order.size() - base);

            Tensor x({int(b), 1, cfg.patch, cfg.patch});
            LabelBatch labels(int(b), cfg.patch, cfg.patch);
            for (std::size_t k = 0; k < b; ++k) {
                const PatchSample& src = pool[order[base + k]];
                PatchSample sample;
                if (cfg.augment_enabled) {
                    Rng aug_rng(derive_seed(cfg.seed, 0xa6u, std::uint64_t(epoch),
                                            std::uint64_t(order[base + k])));
                    sample = augment(src, cfg.aug, aug_rng);
                }
                const PatchSample& use = cfg.augment_enabled ? sample : src;
                std::copy(use.input.data.begin(), use.input.data.end(),
                          x.v.begin() + std::ptrdiff_t(k) * cfg.patch * cfg.patch);
                std::copy(use.labels.data.begin(), use.labels.data.end(),
                          labels.v.begin() + std::ptrdiff_t(k) * cfg.patch * cfg.patch);
            }

            Rng drop_rng(derive_seed(cfg.seed, 0xd0u, std::uint64_t(epoch), batch_idx));
            net.params.zero_grads();
            SideOutputSet outs = net.forward(x, Mode::Train, &drop_rng);
            LossParts parts = total_loss_and_grads(net, outs, labels, weights, cfg.l2);
            if (!std::isfinite(parts.total))
                throw Error("non-finite loss at epoch " + std::to_string(epoch) + ", batch " +
                            std::to_string(batch_idx));
            sgd_step(net.params, opt, float(lr), float(cfg.momentum));

            sum_total += parts.total * double(b);
            sum_fused += parts.fused * double(b);
            for (int i = 0; i < n_sides; ++i) sum_sides[i] += parts.sides[i] * double(b);
            seen += b;
        }

        EpochRecord rec;
        rec.epoch = epoch;
        rec.lr = lr;
        rec.total = sum_total / double(seen);
        rec.fused = sum_fused / double(seen);
        for (double s : sum_sides) rec.sides.push_back(s / double(seen));
        rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        result.log.records.push_back(rec);
        if (on_epoch) on_epoch(rec);

        bool last = epoch + 1 == cfg.epochs;
        if (!out_dir.empty() && ((epoch + 1) % cfg.checkpoint_every == 0 || last)) {
            Checkpoint ckpt = make_checkpoint(net.params, opt, std::uint32_t(epoch + 1), digest);
            char name[64];
            std::snprintf(name, sizeof name, "ckpt_%05d.vseg", epoch + 1);
            write_checkpoint(ckpt, out_dir + "/" + name);
            if (last) write_checkpoint(ckpt, out_dir + "/ckpt_final.vseg");
        }
    }

    result.final_checkpoint =
        make_checkpoint(net.params, opt, std::uint32_t(cfg.epochs), digest);
    if (!out_dir.empty()) result.log.save_csv(out_dir + "/trainlog.csv");
    return result;
}

}  // namespace vseg
