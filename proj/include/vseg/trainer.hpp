#pragma once

#include <functional>
#include <string>

#include "vseg/augment.hpp"
#include "vseg/checkpoint.hpp"
#include "vseg/labelgen.hpp"
#include "vseg/loss.hpp"
#include "vseg/optim.hpp"
#include "vseg/patches.hpp"
#include "vseg/unet.hpp"

namespace vseg {

struct TrainConfig {
    int epochs = 200;
    double initial_lr = 0.01;
    int lr_halve_period = 100;  // epochs per halving
    double momentum = 0.9;
    double l2 = 5e-4;
    int batch_size = 8;
    ClassWeights class_weights;
    std::uint64_t seed = 0;
    int checkpoint_every = 10;
    int patch = 96;
    int stride = 48;
    bool augment_enabled = true;
    AugmentConfig aug;

    void validate() const;
};

// initial / 2^floor(epoch / period); epoch must lie in [0, epochs).
double lr_at_epoch(const TrainConfig& cfg, int epoch);

struct EpochRecord {
    int epoch = 0;
    double lr = 0;
    double total = 0;
    double fused = 0;
    std::vector<double> sides;
    double seconds = 0;
};

struct TrainLog {
    std::vector<EpochRecord> records;

    void save_csv(const std::string& path) const;
};

// One whole training image after preprocessing.
struct TrainSample {
    GrayImage input;
    ClassMap labels;
};

struct TrainResult {
    Checkpoint final_checkpoint;
    TrainLog log;
};

std::string config_digest(const NetConfig& net, const TrainConfig& train);

Checkpoint make_checkpoint(const ParamStore& params, const OptimizerState& opt,
                           std::uint32_t epoch, const std::string& digest);

// Epoch loop: seeded shuffle over the patch pool, per-sample augmentation,
// weighted deep-supervision loss, SGD with momentum, periodic checkpoints.
// All per-epoch randomness derives from (seed, epoch, index) so a resumed
// run replays the uninterrupted trajectory exactly.
// `out_dir` empty suppresses checkpoint/log files.
TrainResult train(UNet& net, const std::vector<TrainSample>& data, const TrainConfig& cfg,
                  const std::string& out_dir = "", const Checkpoint* resume = nullptr,
                  const std::function<void(const EpochRecord&)>& on_epoch = nullptr);

}  // namespace vseg
